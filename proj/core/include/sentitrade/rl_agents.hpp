#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "sentitrade/environment.hpp"
#include "sentitrade/neural_net.hpp"

namespace sentitrade::rl {

enum class AgentKind { DQN, DDQN, DDDQN };

std::string_view to_string(AgentKind kind);
std::optional<AgentKind> parse_agent_kind(std::string_view name);

struct Transition {
  StateVector state{};
  Action action = Action::Hold;
  double reward = 0.0;
  StateVector next_state{};
  bool done = false;

  friend bool operator==(const Transition&, const Transition&) = default;
};

/// Fixed-capacity FIFO experience store with uniform sampling.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 1000);

  /// Evicts the oldest transition once full.
  void push(const Transition& t);
  /// k distinct transitions, uniformly at random. Throws std::invalid_argument
  /// if fewer than k are stored.
  std::vector<Transition> sample(std::size_t k, std::mt19937_64& rng) const;
  /// Stored positions (0 = oldest) chosen the same way sample() chooses them.
  std::vector<std::size_t> sample_indices(std::size_t k, std::mt19937_64& rng) const;

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  /// i-th oldest stored transition.
  const Transition& at(std::size_t i) const;

 private:
  std::size_t capacity_;
  std::vector<Transition> ring_;
  std::size_t head_ = 0;  // slot of the oldest entry once full
  std::size_t size_ = 0;
};

/// Linear anneal from `start` to `end` over `decay_steps`, then flat.
struct EpsilonSchedule {
  double start = 1.0;
  double end = 0.05;
  std::size_t decay_steps = 1;

  double at(std::size_t step) const;
};

struct AgentConfig {
  AgentKind kind = AgentKind::DQN;
  double gamma = 0.95;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  std::size_t batch_size = 32;
  std::size_t target_sync_every = 100;  // gradient steps
  std::size_t epochs = 50;
  std::size_t replay_capacity = 1000;
  /// 0 = no cap; otherwise training stops after this many environment steps
  /// and epsilon anneals over that budget.
  std::size_t max_total_steps = 0;
  nn::AdamConfig adam;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// Highest value; ties go to the lowest index.
std::size_t greedy_index(std::span<const double> q);

/// y = r + gamma * max_a Q_target(s', a) * (1 - done)
double dqn_target(const Transition& t, const nn::QModel& target_net, double gamma);

/// y = r + gamma * Q_target(s', argmax_a Q_online(s', a)) * (1 - done)
double ddqn_target(const Transition& t, const nn::QModel& online_net, const nn::QModel& target_net,
                   double gamma);

/// ddqn_target over dueling networks. Throws std::invalid_argument if either
/// network is not dueling.
double dddqn_target(const Transition& t, const nn::QModel& online_net, const nn::QModel& target_net,
                    double gamma);

/// Dispatches on the agent kind.
double bootstrap_target(AgentKind kind, const Transition& t, const nn::QModel& online_net,
                        const nn::QModel& target_net, double gamma);

/// Epsilon-greedy: with probability epsilon a uniform action, otherwise the
/// greedy one. Always consumes one uniform draw, plus one more when exploring.
Action select_action(std::span<const double> q, double epsilon, std::mt19937_64& rng);

/// Fresh network for the kind: plain Q-network for DQN/DDQN, dueling for DDDQN.
nn::QModel make_model(AgentKind kind, std::mt19937_64& rng);

struct EpochStats {
  std::size_t epoch = 0;  // 1-based
  double total_reward = 0.0;
  double mean_loss = 0.0;  // over the epoch's gradient steps; 0 if none
  std::size_t steps = 0;

  friend bool operator==(const EpochStats&, const EpochStats&) = default;
};

struct TrainResult {
  nn::QModel online;
  nn::QModel target;
  std::vector<EpochStats> curves;
  double final_epsilon = 0.0;
  std::size_t env_steps = 0;
  std::size_t gradient_steps = 0;
};

/// One episode per epoch; one mini-batch Adam step per environment step once
/// the buffer holds a batch; target sync every `target_sync_every` gradient
/// steps. A single generator seeded from config.seed drives initialisation,
/// exploration and sampling, so results are a pure function of the inputs.
TrainResult train(const AgentConfig& config, Environment& env);
/// Same, starting from the given online network.
TrainResult train(const AgentConfig& config, Environment& env, nn::QModel initial,
                  std::mt19937_64& rng);

}  // namespace sentitrade::rl
