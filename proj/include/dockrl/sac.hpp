#ifndef DOCKRL_SAC_HPP_
#define DOCKRL_SAC_HPP_

#include <cmath>
#include <utility>

#include "dockrl/agent.hpp"
#include "dockrl/replay_buffer.hpp"

namespace dockrl {

constexpr double kLogStdMin = -20.0;
constexpr double kLogStdMax = 2.0;

// Squashed Gaussian a = tanh(mean + exp(log_std) * z).  Matrices are
// (action_dim x batch); log-probabilities come back as (1 x batch).
template <typename Scalar>
struct SquashedGaussian {
  using M = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  // log(1 - tanh(u)^2) evaluated without cancellation near |a| = 1.
  static Scalar log1m_tanh_sq(Scalar u) {
    const Scalar x = Scalar(-2) * u;
    const Scalar softplus =
        std::max(x, Scalar(0)) + std::log1p(std::exp(-std::abs(x)));
    return Scalar(2) * (Scalar(std::log(2.0)) - u - softplus);
  }

  static M pre_squash(const M& mean, const M& log_std, const M& z) {
    return mean + (log_std.array().exp() * z.array()).matrix();
  }

  static M log_prob(const M& mean, const M& log_std, const M& z) {
    const M u = pre_squash(mean, log_std, z);
    const Scalar half_log_2pi = Scalar(0.5 * std::log(2.0 * 3.141592653589793));
    M out = M::Zero(1, mean.cols());
    for (Eigen::Index c = 0; c < mean.cols(); ++c) {
      Scalar s = 0;
      for (Eigen::Index i = 0; i < mean.rows(); ++i) {
        s += Scalar(-0.5) * z(i, c) * z(i, c) - log_std(i, c) - half_log_2pi -
             log1m_tanh_sq(u(i, c));
      }
      out(0, c) = s;
    }
    return out;
  }

  // Gradients of L = weight * sum_c (alpha * log_prob_c - Q(a_c)) with
  // respect to mean and log_std at fixed noise z, given dq_da = dQ/da.
  static std::pair<M, M> actor_grad(const M& mean, const M& log_std,
                                    const M& z, const M& dq_da, Scalar alpha,
                                    Scalar weight) {
    const M u = pre_squash(mean, log_std, z);
    const M a = u.array().tanh().matrix();
    const M sigma = log_std.array().exp().matrix();
    const M one_minus_a2 = (Scalar(1) - a.array().square()).matrix();
    // d log_prob / d u = 2 a;  da/du = 1 - a^2;  du/dlog_std = sigma z.
    const M dl_du = (alpha * Scalar(2) * a.array() -
                     dq_da.array() * one_minus_a2.array())
                        .matrix();
    M d_mean = weight * dl_du;
    M d_log_std =
        weight * (dl_du.array() * sigma.array() * z.array() - alpha).matrix();
    return {d_mean, d_log_std};
  }
};

// Returns (action, log_prob).  With deterministic = true the noise is zero.
std::pair<Action, double> sac_select_action(const Mlp& actor,
                                            const Observation& state, Rng& rng,
                                            bool deterministic);

// r + gamma * not_done * (min(q1, q2) - alpha * log_prob_next).
MatrixF sac_critic_target(const MatrixF& rewards, const MatrixF& not_done,
                          const MatrixF& q1_next, const MatrixF& q2_next,
                          const MatrixF& log_prob_next, double alpha,
                          double gamma);

// Gradient of the temperature loss log_alpha * (-log_prob - target_entropy)
// with respect to log_alpha.
double sac_log_alpha_grad(const MatrixF& log_prob, double target_entropy);

struct SacNets {
  Mlp actor;  // outputs [mean; log_std]
  Mlp critic1, critic2;
  Mlp critic1_target, critic2_target;
};

class SacAgent : public Agent {
 public:
  SacAgent(const AgentConfig& cfg, std::uint64_t seed);

  Action explore(const Observation& obs) override;
  Action act(const Observation& obs) const override;
  void observe(const Transition& t, bool episode_end) override;
  const LossReport& last_report() const override { return report_; }
  void save(const std::filesystem::path& dir) const override;
  void load(const std::filesystem::path& dir) override;
  Policy policy() const override;

  LossReport update(const TransitionBatch& batch);

  SacNets& nets() { return nets_; }
  double alpha() const { return std::exp(log_alpha_); }
  double log_alpha() const { return log_alpha_; }

 private:
  AgentConfig cfg_;
  SacNets nets_;
  Adam actor_opt_, critic1_opt_, critic2_opt_;
  BasicAdam<double> alpha_opt_;
  double log_alpha_;
  double log_alpha_grad_ = 0.0;
  ReplayBuffer buffer_;
  Rng explore_rng_, sample_rng_;
  long steps_ = 0;
  LossReport report_;
};

}  // namespace dockrl

#endif  // DOCKRL_SAC_HPP_
