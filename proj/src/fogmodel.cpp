#include "fogsim/fogmodel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fogsim/error.hpp"

namespace fogsim::fog {

Attenuation Attenuation::from_visibility(double visibility_m) {
    if (!(visibility_m > 0.0) || !std::isfinite(visibility_m)) {
        throw InvalidArgument("invalid visibility " + std::to_string(visibility_m) +
                              " m: must be positive and finite");
    }
    return Attenuation(-std::log(kContrastThreshold) / visibility_m, visibility_m);
}

Attenuation Attenuation::from_beta(double beta) {
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw InvalidArgument("attenuation coefficient must be positive and finite");
    }
    return Attenuation(beta, std::nullopt);
}

Attenuation FogLevelLadder::attenuation(int level) const {
    if (level < 1 || level > kLevels) {
        throw InvalidArgument("fog level must be in 1.." + std::to_string(kLevels) + ", got " +
                              std::to_string(level));
    }
    return Attenuation::from_beta(optical_thickness[static_cast<std::size_t>(level - 1)]);
}

AtmosphericLight make_light(const Color& color) {
    for (double c : color) {
        if (!(c >= 0.0 && c <= 1.0)) {
            throw InvalidArgument("atmospheric light channels must lie in [0,1]");
        }
    }
    return AtmosphericLight{color};
}

TransmissionMap transmission(const depth::MetricDepth& depth, const Attenuation& att) {
    TransmissionMap t(depth.width(), depth.height());
    constexpr double kTiny = std::numeric_limits<double>::min();
    for (std::size_t i = 0; i < depth.size(); ++i) {
        t[i] = std::max(std::exp(-att.beta() * depth[i]), kTiny);
    }
    return t;
}

RasterImage composite(const RasterImage& clear, const TransmissionMap& t,
                      const AtmosphericLight& light) {
    if (!clear.same_shape(t)) {
        throw DimensionMismatch("image is " + std::to_string(clear.width()) + "x" +
                                std::to_string(clear.height()) + " but transmission is " +
                                std::to_string(t.width()) + "x" + std::to_string(t.height()));
    }
    RasterImage out(clear.width(), clear.height());
    auto src = clear.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double ti = t[i];
        for (std::size_t c = 0; c < 3; ++c) {
            const double v = src[3 * i + c] * ti + light.color[c] * (1.0 - ti);
            dst[3 * i + c] = std::clamp(v, 0.0, 1.0);
        }
    }
    return out;
}

}  // namespace fogsim::fog
