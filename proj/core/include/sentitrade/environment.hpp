#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace sentitrade {

/// Network input layout; the order of EnvState's fields.
inline constexpr std::size_t kStateSize = 6;
using StateVector = std::array<double, kStateSize>;

/// Index order is the network output layout.
enum class Action : std::size_t { Buy = 0, Sell = 1, Hold = 2 };
inline constexpr std::size_t kNumActions = 3;

/// Buy -> +1, Sell -> -1, Hold -> 0.
constexpr int direction(Action a) {
  switch (a) {
    case Action::Buy: return 1;
    case Action::Sell: return -1;
    case Action::Hold: return 0;
  }
  return 0;
}

constexpr std::size_t index_of(Action a) { return static_cast<std::size_t>(a); }
constexpr Action action_at(std::size_t i) { return static_cast<Action>(i); }

std::string_view to_string(Action a);
std::optional<Action> parse_action(std::string_view name);

struct Step {
  StateVector next_state{};
  double reward = 0.0;
  bool done = false;
};

/// Episodic decision process driven by the trainer.
class Environment {
 public:
  virtual ~Environment() = default;
  virtual StateVector reset() = 0;
  /// Throws std::logic_error when called after the episode is done.
  virtual Step step(Action action) = 0;
  /// Nominal number of steps per episode (used to size exploration schedules).
  virtual std::size_t episode_length() const = 0;
};

}  // namespace sentitrade
