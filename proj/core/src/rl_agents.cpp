#include "sentitrade/rl_agents.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "sentitrade/io_util.hpp"

namespace sentitrade::rl {

std::string_view to_string(AgentKind kind) {
  switch (kind) {
    case AgentKind::DQN: return "DQN";
    case AgentKind::DDQN: return "DDQN";
    case AgentKind::DDDQN: return "DDDQN";
  }
  return "?";
}

std::optional<AgentKind> parse_agent_kind(std::string_view name) {
  const auto n = to_lower_ascii(trim(name));
  if (n == "dqn") return AgentKind::DQN;
  if (n == "ddqn") return AgentKind::DDQN;
  if (n == "dddqn") return AgentKind::DDDQN;
  return std::nullopt;
}

// ------------------------------------------------------- ReplayBuffer

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("replay capacity must be positive");
  ring_.reserve(capacity);
}

void ReplayBuffer::push(const Transition& t) {
  if (size_ < capacity_) {
    ring_.push_back(t);
    ++size_;
    return;
  }
  ring_[head_] = t;
  head_ = (head_ + 1) % capacity_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  if (i >= size_) throw std::out_of_range("replay index out of range");
  return ring_[(head_ + i) % capacity_];
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t k, std::mt19937_64& rng) const {
  if (k > size_) {
    throw std::invalid_argument("cannot sample " + std::to_string(k) + " transitions from a buffer of " +
                                std::to_string(size_));
  }
  std::vector<std::size_t> idx(size_);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  // Partial Fisher-Yates: the first k slots end up a uniform k-subset.
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, size_ - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(k);
  return idx;
}

std::vector<Transition> ReplayBuffer::sample(std::size_t k, std::mt19937_64& rng) const {
  std::vector<Transition> out;
  out.reserve(k);
  for (auto i : sample_indices(k, rng)) out.push_back(at(i));
  return out;
}

// ---------------------------------------------------------- config

double EpsilonSchedule::at(std::size_t step) const {
  if (decay_steps == 0 || step >= decay_steps) return end;
  const double frac = static_cast<double>(step) / static_cast<double>(decay_steps);
  return start + (end - start) * frac;
}

void AgentConfig::validate() const {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must be in [0, 1)");
  if (!(epsilon_start >= 0.0 && epsilon_start <= 1.0)) {
    throw std::invalid_argument("epsilon_start must be in [0, 1]");
  }
  if (!(epsilon_end >= 0.0 && epsilon_end <= 1.0)) {
    throw std::invalid_argument("epsilon_end must be in [0, 1]");
  }
  if (batch_size == 0) throw std::invalid_argument("batch_size must be positive");
  if (target_sync_every == 0) throw std::invalid_argument("target_sync_every must be positive");
  if (replay_capacity < batch_size) {
    throw std::invalid_argument("replay_capacity must be >= batch_size");
  }
  if (!(adam.learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be positive");
}

// --------------------------------------------------------- targets

std::size_t greedy_index(std::span<const double> q) {
  if (q.empty()) throw std::invalid_argument("greedy_index of an empty vector");
  std::size_t best = 0;
  for (std::size_t i = 1; i < q.size(); ++i) {
    if (q[i] > q[best]) best = i;
  }
  return best;
}

double dqn_target(const Transition& t, const nn::QModel& target_net, double gamma) {
  if (t.done) return t.reward;
  const auto q = target_net.forward(t.next_state);
  return t.reward + gamma * *std::max_element(q.begin(), q.end());
}

double ddqn_target(const Transition& t, const nn::QModel& online_net, const nn::QModel& target_net,
                   double gamma) {
  if (t.done) return t.reward;
  const auto a = greedy_index(online_net.forward(t.next_state));
  return t.reward + gamma * target_net.forward(t.next_state)[a];
}

double dddqn_target(const Transition& t, const nn::QModel& online_net, const nn::QModel& target_net,
                    double gamma) {
  if (!online_net.is_dueling() || !target_net.is_dueling()) {
    throw std::invalid_argument("dddqn_target requires dueling networks");
  }
  return ddqn_target(t, online_net, target_net, gamma);
}

double bootstrap_target(AgentKind kind, const Transition& t, const nn::QModel& online_net,
                        const nn::QModel& target_net, double gamma) {
  switch (kind) {
    case AgentKind::DQN: return dqn_target(t, target_net, gamma);
    case AgentKind::DDQN: return ddqn_target(t, online_net, target_net, gamma);
    case AgentKind::DDDQN: return dddqn_target(t, online_net, target_net, gamma);
  }
  throw std::invalid_argument("unknown agent kind");
}

Action select_action(std::span<const double> q, double epsilon, std::mt19937_64& rng) {
  if (q.size() != kNumActions) throw std::invalid_argument("select_action expects 3 Q-values");
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (coin(rng) < epsilon) {
    std::uniform_int_distribution<std::size_t> pick(0, kNumActions - 1);
    return action_at(pick(rng));
  }
  return action_at(greedy_index(q));
}

nn::QModel make_model(AgentKind kind, std::mt19937_64& rng) {
  if (kind == AgentKind::DDDQN) return nn::QModel{nn::make_dueling_q_network(rng)};
  return nn::QModel{nn::make_q_network(rng)};
}

// ----------------------------------------------------------- train

TrainResult train(const AgentConfig& config, Environment& env) {
  std::mt19937_64 rng(config.seed);
  auto model = make_model(config.kind, rng);
  return train(config, env, std::move(model), rng);
}

TrainResult train(const AgentConfig& config, Environment& env, nn::QModel initial,
                  std::mt19937_64& rng) {
  config.validate();
  if (config.kind == AgentKind::DDDQN && !initial.is_dueling()) {
    throw std::invalid_argument("DDDQN needs a dueling network");
  }
  TrainResult result;
  result.online = std::move(initial);
  result.target = result.online;

  const std::size_t decay =
      config.max_total_steps > 0 ? config.max_total_steps : config.epochs * env.episode_length();
  const EpsilonSchedule schedule{config.epsilon_start, config.epsilon_end, decay};
  ReplayBuffer buffer(config.replay_capacity);
  auto blocks = result.online.parameter_blocks();
  auto adam = nn::AdamState::for_blocks(blocks, config.adam);
  auto grads = result.online.zero_gradients();
  const double inv_batch = 1.0 / static_cast<double>(config.batch_size);

  auto budget_left = [&] {
    return config.max_total_steps == 0 || result.env_steps < config.max_total_steps;
  };

  for (std::size_t epoch = 0; epoch < config.epochs && budget_left(); ++epoch) {
    EpochStats stats;
    stats.epoch = epoch + 1;
    double loss_sum = 0.0;
    std::size_t loss_count = 0;

    StateVector state = env.reset();
    bool done = false;
    while (!done && budget_left()) {
      const auto q = result.online.forward(state);
      const Action action = select_action(q, schedule.at(result.env_steps), rng);
      const Step step = env.step(action);
      buffer.push({state, action, step.reward, step.next_state, step.done});
      stats.total_reward += step.reward;
      ++stats.steps;
      ++result.env_steps;
      state = step.next_state;
      done = step.done;

      if (buffer.size() < config.batch_size) continue;
      for (auto& g : grads) std::fill(g.begin(), g.end(), 0.0);
      double batch_loss = 0.0;
      for (auto i : buffer.sample_indices(config.batch_size, rng)) {
        const auto& tr = buffer.at(i);
        const double y = bootstrap_target(config.kind, tr, result.online, result.target, config.gamma);
        batch_loss += result.online.accumulate_gradient(tr.state, index_of(tr.action), y, grads, inv_batch);
      }
      nn::adam_step(blocks, grads, adam);
      ++result.gradient_steps;
      loss_sum += batch_loss * inv_batch;
      ++loss_count;
      if (result.gradient_steps % config.target_sync_every == 0) result.target = result.online;
    }
    stats.mean_loss = loss_count == 0 ? 0.0 : loss_sum / static_cast<double>(loss_count);
    result.curves.push_back(stats);
  }
  result.final_epsilon = schedule.at(result.env_steps);
  return result;
}

}  // namespace sentitrade::rl
