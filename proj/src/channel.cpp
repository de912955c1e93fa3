#include "ehwsn/channel.hpp"

namespace ehwsn {

ChannelState<double> sample_gains(Rng& rng, Eigen::Index links, const GainDistribution& dist) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    ChannelState<double> ch;
    ch.gain = Eigen::MatrixXd::Zero(links, links);
    ch.noise = Eigen::VectorXd::Constant(links, dist.noise);
    for (Eigen::Index k = 0; k < links; ++k) {
        for (Eigen::Index l = 0; l < links; ++l) {
            // 1 - u lies in (0, 1], so cross gains never vanish.
            ch.gain(k, l) = k == l ? dist.direct_gain : dist.max_interference_gain * (1.0 - unit(rng));
        }
    }
    return ch;
}

}  // namespace ehwsn
