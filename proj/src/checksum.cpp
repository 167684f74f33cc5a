#include "fogsim/checksum.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstring>
#include <fstream>
#include <memory>
#include <vector>

#include "fogsim/error.hpp"

namespace fogsim {

namespace {

struct DigestContext {
    DigestContext() : ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free) {
        if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
            throw Error("failed to initialise SHA-256 context");
        }
    }

    void update(const void* data, std::size_t n) {
        if (EVP_DigestUpdate(ctx.get(), data, n) != 1) {
            throw Error("SHA-256 update failed");
        }
    }

    std::array<unsigned char, 32> finish() {
        std::array<unsigned char, 32> out{};
        unsigned int len = 0;
        if (EVP_DigestFinal_ex(ctx.get(), out.data(), &len) != 1 || len != out.size()) {
            throw Error("SHA-256 finalisation failed");
        }
        return out;
    }

    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx;
};

std::string to_hex(const std::array<unsigned char, 32>& digest) {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string s;
    s.reserve(64);
    for (unsigned char b : digest) {
        s.push_back(kHex[b >> 4]);
        s.push_back(kHex[b & 0xF]);
    }
    return s;
}

}  // namespace

std::string sha256_hex(std::span<const unsigned char> bytes) {
    DigestContext d;
    d.update(bytes.data(), bytes.size());
    return to_hex(d.finish());
}

std::string sha256_hex(std::string_view text) {
    DigestContext d;
    d.update(text.data(), text.size());
    return to_hex(d.finish());
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    DigestContext d;
    std::vector<char> buf(1 << 16);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        d.update(buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    return to_hex(d.finish());
}

std::string grid_digest(const ScalarGrid& grid) {
    DigestContext d;
    const std::int64_t dims[2] = {grid.width(), grid.height()};
    d.update(dims, sizeof(dims));
    const auto v = grid.values();
    d.update(v.data(), v.size_bytes());
    return to_hex(d.finish());
}

std::uint64_t stable_hash64(std::string_view text) {
    DigestContext d;
    d.update(text.data(), text.size());
    const auto digest = d.finish();
    std::uint64_t h = 0;
    for (int i = 0; i < 8; ++i) {
        h = (h << 8) | digest[static_cast<std::size_t>(i)];
    }
    return h;
}

}  // namespace fogsim
