#ifndef EHWSN_CHANNEL_HPP
#define EHWSN_CHANNEL_HPP

#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Core>

#include "ehwsn/errors.hpp"

namespace ehwsn {

using Rng = std::mt19937_64;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Gains among the active links of one slot. gain(k, l) is the gain from the
/// transmitter of link k to the receiver of link l, so column l collects
/// everything heard at receiver l and the diagonal holds the direct gains.
template <typename Scalar>
struct ChannelState {
    MatrixX<Scalar> gain;
    VectorX<Scalar> noise;

    Eigen::Index links() const { return noise.size(); }

    void validate() const {
        if (gain.rows() != gain.cols() || gain.rows() != noise.size()) {
            throw ValidationError("channel: gain matrix must be square and match the noise vector");
        }
        for (Eigen::Index k = 0; k < gain.rows(); ++k) {
            if (!(noise(k) > Scalar(0))) throw ValidationError("channel: noise power must be positive");
            if (!(gain(k, k) > Scalar(0))) throw ValidationError("channel: direct gain must be positive");
            for (Eigen::Index l = 0; l < gain.cols(); ++l) {
                if (!(gain(k, l) >= Scalar(0))) throw ValidationError("channel: negative gain");
            }
        }
    }

    template <typename Other>
    ChannelState<Other> cast() const {
        return {gain.template cast<Other>(), noise.template cast<Other>()};
    }

    /// Same state with every interference gain removed.
    ChannelState orthogonal() const {
        ChannelState out = *this;
        out.gain = gain.diagonal().asDiagonal();
        return out;
    }
};

/// Transmit powers together with their logarithms.
template <typename Scalar>
class PowerVector {
public:
    static PowerVector from_power(VectorX<Scalar> p) {
        if (!(p.array() > Scalar(0)).all()) throw ValidationError("powers must be positive");
        PowerVector out;
        out.log_power_ = p.array().log().matrix();
        out.power_ = std::move(p);
        return out;
    }

    static PowerVector from_log(VectorX<Scalar> ptilde) {
        PowerVector out;
        out.power_ = ptilde.array().exp().matrix();
        out.log_power_ = std::move(ptilde);
        return out;
    }

    const VectorX<Scalar>& power() const noexcept { return power_; }
    const VectorX<Scalar>& log_power() const noexcept { return log_power_; }
    Eigen::Index size() const noexcept { return power_.size(); }

private:
    VectorX<Scalar> power_;
    VectorX<Scalar> log_power_;
};

/// Noise plus interference seen at the receiver of link `l`.
template <typename Scalar, typename Derived>
Scalar interference_plus_noise(const ChannelState<Scalar>& ch, const Eigen::MatrixBase<Derived>& p,
                               Eigen::Index l) {
    Scalar total = ch.noise(l);
    for (Eigen::Index k = 0; k < ch.links(); ++k) {
        if (k != l) total += ch.gain(k, l) * p(k);
    }
    return total;
}

template <typename Scalar, typename Derived>
Scalar sinr(const ChannelState<Scalar>& ch, const Eigen::MatrixBase<Derived>& p, Eigen::Index l) {
    return ch.gain(l, l) * p(l) / interference_plus_noise(ch, p, l);
}

template <typename Scalar>
Scalar sinr(const ChannelState<Scalar>& ch, const PowerVector<Scalar>& p, Eigen::Index l) {
    return sinr(ch, p.power(), l);
}

template <typename Scalar>
VectorX<Scalar> sinr_all(const ChannelState<Scalar>& ch, const VectorX<Scalar>& p) {
    VectorX<Scalar> out(ch.links());
    for (Eigen::Index l = 0; l < ch.links(); ++l) out(l) = sinr(ch, p, l);
    return out;
}

/// Shannon rate 0.5 ln(1 + SINR), nats per channel use.
template <typename Scalar, typename Derived>
Scalar capacity_exact(const ChannelState<Scalar>& ch, const Eigen::MatrixBase<Derived>& p, Eigen::Index l) {
    using std::log1p;
    return Scalar(0.5) * log1p(sinr(ch, p, l));
}

/// log of (noise + interference) / (direct gain * power) at link `l`, written
/// in log-powers. This is -2 times the high-SINR rate and is convex in ptilde.
template <typename Scalar, typename Derived>
Scalar log_inverse_sinr(const ChannelState<Scalar>& ch, const Eigen::MatrixBase<Derived>& ptilde,
                        Eigen::Index l) {
    using std::exp;
    using std::log;
    Scalar peak = log(ch.noise(l)) - ptilde(l);
    for (Eigen::Index k = 0; k < ch.links(); ++k) {
        if (k != l && ch.gain(k, l) > Scalar(0)) {
            peak = std::max(peak, Scalar(log(ch.gain(k, l)) + ptilde(k) - ptilde(l)));
        }
    }
    Scalar sum = exp(log(ch.noise(l)) - ptilde(l) - peak);
    for (Eigen::Index k = 0; k < ch.links(); ++k) {
        if (k != l && ch.gain(k, l) > Scalar(0)) {
            sum += exp(log(ch.gain(k, l)) + ptilde(k) - ptilde(l) - peak);
        }
    }
    return peak + log(sum) - log(ch.gain(l, l));
}

/// High-SINR rate 0.5 ln(SINR) evaluated on log-powers. Concave in ptilde and
/// never above capacity_exact.
template <typename Scalar, typename Derived>
Scalar capacity_approx(const ChannelState<Scalar>& ch, const Eigen::MatrixBase<Derived>& ptilde,
                       Eigen::Index l) {
    return Scalar(-0.5) * log_inverse_sinr(ch, ptilde, l);
}

template <typename Scalar>
Scalar capacity_approx(const ChannelState<Scalar>& ch, const PowerVector<Scalar>& p, Eigen::Index l) {
    return capacity_approx(ch, p.log_power(), l);
}

/// M/M/1 delay of flow `d` on a link of rate `c`; throws when c <= d.
template <typename Scalar>
Scalar link_delay(Scalar d, Scalar c, long link = -1) {
    if (!(c > d)) {
        throw CapacityViolation(link, static_cast<double>(d), static_cast<double>(c));
    }
    return d / (c - d);
}

template <typename Scalar>
Scalar total_delay(const VectorX<Scalar>& d, const VectorX<Scalar>& c) {
    if (d.size() != c.size()) throw ValidationError("total_delay: flow and rate sizes differ");
    Scalar sum(0);
    for (Eigen::Index l = 0; l < d.size(); ++l) sum += link_delay(d(l), c(l), static_cast<long>(l));
    return sum;
}

struct GainDistribution {
    double max_interference_gain = 0.01;  ///< off-diagonal gains ~ U(0, max]
    double direct_gain = 1.0;
    double noise = 1e-5;
};

/// Unit direct gains, U(0, 0.01] cross gains, noise 1e-5 by default.
ChannelState<double> sample_gains(Rng& rng, Eigen::Index links, const GainDistribution& dist = {});

}  // namespace ehwsn

#endif  // EHWSN_CHANNEL_HPP
