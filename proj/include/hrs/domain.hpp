#pragma once

// Pick-and-place worlds and their grounding into a probabilistic
// manipulation-domain MDP.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hrs/ltlf.hpp"

namespace hrs {

using ObjectIndex = std::uint16_t;
using LocationIndex = std::uint16_t;

inline constexpr std::string_view kElse = "else";
inline constexpr std::string_view kRobotGripper = "robot_gripper";
inline constexpr std::string_view kHumanGripper = "human_gripper";

enum class Actor { Robot, Human };
enum class ActionKind { Grasp, Place, Move, Wait, Stay };

std::string_view to_string(Actor a);

struct SuccessRates {
  double grasp = 1.0;
  double place = 1.0;
};

/// Relative likelihood of a human relocation. A weight of zero removes the
/// move from the human's repertoire; positive weights keep it.
struct HumanLikelihood {
  std::string object;
  std::string from;
  std::string to;
  double weight = 1.0;
};

/// "object is at one of locations". A single location is the usual case;
/// several locations expand to their disjunction.
struct PropositionDef {
  std::string name;
  std::string object;
  std::vector<std::string> locations;
};

/// Declarative description of a world, as read from a scenario file.
struct WorldSpec {
  std::vector<std::string> objects;
  std::vector<std::string> locations;
  SuccessRates robot_success;
  std::map<std::string, SuccessRates> robot_success_per_object;
  double human_success = 1.0;
  std::vector<HumanLikelihood> human_likelihood;
  /// Absent entries are unbounded; grippers are always capacity 1.
  std::map<std::string, int> capacities;
  /// (lower, upper): an object at `lower` cannot be grasped while `upper` is occupied.
  std::vector<std::pair<std::string, std::string>> stacking;
  bool robot_can_place_else = true;
};

/// Total map object -> location.
struct Arrangement {
  std::vector<LocationIndex> placement;

  LocationIndex operator[](std::size_t object) const { return placement[object]; }
  friend bool operator==(const Arrangement&, const Arrangement&) = default;
  friend auto operator<=>(const Arrangement&, const Arrangement&) = default;
};

struct ArrangementHash {
  std::size_t operator()(const Arrangement& a) const noexcept;
};

struct Outcome {
  Arrangement next;
  double probability;
};

struct GroundedAction {
  Actor actor;
  ActionKind kind;
  std::optional<ObjectIndex> object;
  LocationIndex from = 0;
  LocationIndex to = 0;
  std::vector<Outcome> outcomes;
  std::string name;
};

/// Validated, index-resolved world. Immutable after construction.
class World {
 public:
  /// Throws ParamError on an inconsistent spec.
  explicit World(WorldSpec spec);

  const WorldSpec& spec() const { return spec_; }
  std::size_t num_objects() const { return spec_.objects.size(); }
  std::size_t num_locations() const { return spec_.locations.size(); }
  const std::string& object_name(std::size_t o) const { return spec_.objects[o]; }
  const std::string& location_name(std::size_t l) const { return spec_.locations[l]; }

  ObjectIndex object(std::string_view name) const;
  LocationIndex location(std::string_view name) const;
  LocationIndex else_location() const { return else_; }
  LocationIndex robot_gripper() const { return robot_gripper_; }
  LocationIndex human_gripper() const { return human_gripper_; }
  bool is_gripper(LocationIndex l) const { return l == robot_gripper_ || l == human_gripper_; }

  /// -1 means unbounded.
  int capacity(LocationIndex l) const { return capacity_[l]; }
  double grasp_success(ObjectIndex o) const { return success_[o].grasp; }
  double place_success(ObjectIndex o) const { return success_[o].place; }
  bool human_may_move(ObjectIndex o, LocationIndex from, LocationIndex to) const;
  /// Locations stacked on top of `lower`.
  const std::vector<LocationIndex>& uppers(LocationIndex lower) const { return uppers_[lower]; }

  /// Objects at `l` under `a`.
  int occupancy(const Arrangement& a, LocationIndex l) const;
  bool has_room(const Arrangement& a, LocationIndex l) const;
  std::optional<ObjectIndex> held_by_robot(const Arrangement& a) const;

  /// Arrangement from an object -> location-name map. Throws ParamError.
  Arrangement arrangement(const std::map<std::string, std::string>& placement) const;
  /// Throws ParamError when gripper exclusivity or a capacity is violated.
  void check(const Arrangement& a) const;
  std::string describe(const Arrangement& a) const;

 private:
  WorldSpec spec_;
  LocationIndex else_ = 0;
  LocationIndex robot_gripper_ = 0;
  LocationIndex human_gripper_ = 0;
  std::vector<int> capacity_;
  std::vector<SuccessRates> success_;
  std::vector<std::vector<LocationIndex>> uppers_;
  std::vector<bool> human_blocked_;  // object x from x to
};

/// Proposition resolved against a world.
struct Proposition {
  std::string name;
  ObjectIndex object;
  std::vector<LocationIndex> locations;
};

/// Resolves definitions; throws ParamError on unknown names or duplicates.
/// Multi-location definitions keep their locations in lexicographic order.
std::vector<Proposition> resolve_propositions(const World& w, const std::vector<PropositionDef>& defs);

Label label_of(const std::vector<Proposition>& props, const Arrangement& a);

/// Robot grasps (objects in index order) followed by places (destinations in
/// index order).
std::vector<GroundedAction> ground_robot_actions(const World& w, const Arrangement& s);

/// Human relocations (objects, then destinations, in index order) followed by `wait`.
std::vector<GroundedAction> ground_human_actions(const World& w, const Arrangement& s);

struct MdpTransition {
  std::size_t target;
  double probability;
};

/// Robot-only abstraction of a world.
struct Mdp {
  std::vector<Arrangement> states;
  std::size_t initial = 0;
  std::vector<std::vector<GroundedAction>> actions;
  /// trans[s][a] lists successors of action a at state s, by ascending target.
  std::vector<std::vector<std::vector<MdpTransition>>> trans;
  std::vector<std::string> propositions;
  std::vector<Label> labeling;
};

/// Breadth-first closure from `init` under robot actions. States are numbered
/// in discovery order. Throws CapacityError past `max_states`.
Mdp build_mdp(const World& w, const Arrangement& init, const std::vector<PropositionDef>& props,
              std::size_t max_states = 1'000'000);

}  // namespace hrs
