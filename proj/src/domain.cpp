#include "hrs/domain.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <set>
#include <unordered_map>

#include "hrs/errors.hpp"

namespace hrs {

std::string_view to_string(Actor a) { return a == Actor::Robot ? "robot" : "human"; }

std::size_t ArrangementHash::operator()(const Arrangement& a) const noexcept {
  std::size_t h = 0xcbf29ce484222325ull;
  for (LocationIndex l : a.placement) {
    h ^= l;
    h *= 0x100000001b3ull;
  }
  return h;
}

namespace {

void check_probability(double p, const std::string& what) {
  if (!(p >= 0.0 && p <= 1.0)) throw ParamError(what + " must lie in [0,1]");
}

template <typename Names>
std::size_t index_of(const Names& names, std::string_view name, const char* kind) {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw ParamError(std::string("unknown ") + kind + " '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - names.begin());
}

}  // namespace

World::World(WorldSpec spec) : spec_(std::move(spec)) {
  const auto unique = [](const std::vector<std::string>& v) { return std::set<std::string>(v.begin(), v.end()).size() == v.size(); };
  if (spec_.objects.empty()) throw ParamError("a world needs at least one object");
  if (!unique(spec_.objects)) throw ParamError("object names must be unique");
  if (!unique(spec_.locations)) throw ParamError("location names must be unique");
  for (auto required : {kElse, kRobotGripper, kHumanGripper}) {
    if (std::find(spec_.locations.begin(), spec_.locations.end(), required) == spec_.locations.end())
      throw ParamError("location '" + std::string(required) + "' is required");
  }
  if (spec_.objects.size() > 0xffff || spec_.locations.size() > 0xffff) throw ParamError("world too large");
  else_ = location(kElse);
  robot_gripper_ = location(kRobotGripper);
  human_gripper_ = location(kHumanGripper);

  capacity_.assign(num_locations(), -1);
  for (const auto& [name, cap] : spec_.capacities) {
    const LocationIndex l = location(name);
    if (cap < 0) throw ParamError("capacity of '" + name + "' must be non-negative");
    if (l == else_) throw ParamError("'else' has unbounded capacity");
    capacity_[l] = cap;
  }
  capacity_[robot_gripper_] = 1;
  capacity_[human_gripper_] = 1;

  check_probability(spec_.robot_success.grasp, "robot grasp success");
  check_probability(spec_.robot_success.place, "robot place success");
  check_probability(spec_.human_success, "human success");
  success_.assign(num_objects(), spec_.robot_success);
  for (const auto& [name, rates] : spec_.robot_success_per_object) {
    check_probability(rates.grasp, "robot grasp success of '" + name + "'");
    check_probability(rates.place, "robot place success of '" + name + "'");
    success_[object(name)] = rates;
  }

  uppers_.assign(num_locations(), {});
  for (const auto& [lower, upper] : spec_.stacking) {
    const LocationIndex lo = location(lower);
    const LocationIndex up = location(upper);
    if (is_gripper(lo) || is_gripper(up) || lo == else_ || up == else_ || lo == up)
      throw ParamError("stacking pair (" + lower + ", " + upper + ") must relate two distinct ordinary locations");
    uppers_[lo].push_back(up);
  }
  for (auto& u : uppers_) std::sort(u.begin(), u.end());

  const std::size_t L = num_locations();
  human_blocked_.assign(num_objects() * L * L, false);
  for (const auto& h : spec_.human_likelihood) {
    if (!(h.weight >= 0.0)) throw ParamError("human likelihood weights must be non-negative");
    const std::size_t o = object(h.object), from = location(h.from), to = location(h.to);
    human_blocked_[(o * L + from) * L + to] = h.weight == 0.0;
  }
}

ObjectIndex World::object(std::string_view name) const {
  return static_cast<ObjectIndex>(index_of(spec_.objects, name, "object"));
}

LocationIndex World::location(std::string_view name) const {
  return static_cast<LocationIndex>(index_of(spec_.locations, name, "location"));
}

bool World::human_may_move(ObjectIndex o, LocationIndex from, LocationIndex to) const {
  const std::size_t L = num_locations();
  return !human_blocked_[(o * L + from) * L + to];
}

int World::occupancy(const Arrangement& a, LocationIndex l) const {
  return static_cast<int>(std::count(a.placement.begin(), a.placement.end(), l));
}

bool World::has_room(const Arrangement& a, LocationIndex l) const {
  return capacity_[l] < 0 || occupancy(a, l) < capacity_[l];
}

std::optional<ObjectIndex> World::held_by_robot(const Arrangement& a) const {
  for (std::size_t o = 0; o < a.placement.size(); ++o)
    if (a.placement[o] == robot_gripper_) return static_cast<ObjectIndex>(o);
  return std::nullopt;
}

Arrangement World::arrangement(const std::map<std::string, std::string>& placement) const {
  Arrangement a;
  a.placement.assign(num_objects(), else_);
  std::vector<bool> seen(num_objects(), false);
  for (const auto& [obj, loc] : placement) {
    const ObjectIndex o = object(obj);
    a.placement[o] = location(loc);
    seen[o] = true;
  }
  for (std::size_t o = 0; o < num_objects(); ++o)
    if (!seen[o]) throw ParamError("initial placement misses object '" + spec_.objects[o] + "'");
  check(a);
  return a;
}

void World::check(const Arrangement& a) const {
  if (a.placement.size() != num_objects()) throw ParamError("arrangement has the wrong number of objects");
  for (LocationIndex l : a.placement)
    if (l >= num_locations()) throw ParamError("arrangement refers to an unknown location");
  for (std::size_t l = 0; l < num_locations(); ++l) {
    const auto loc = static_cast<LocationIndex>(l);
    if (capacity_[l] >= 0 && occupancy(a, loc) > capacity_[l])
      throw ParamError("location '" + spec_.locations[l] + "' over capacity in " + describe(a));
  }
}

std::string World::describe(const Arrangement& a) const {
  std::string out = "{";
  for (std::size_t o = 0; o < a.placement.size(); ++o) {
    if (o) out += ", ";
    out += spec_.objects[o] + "@" + spec_.locations[a.placement[o]];
  }
  return out + "}";
}

std::vector<Proposition> resolve_propositions(const World& w, const std::vector<PropositionDef>& defs) {
  std::vector<Proposition> out;
  std::set<std::string> names;
  for (const auto& d : defs) {
    if (d.name.empty() || !std::isalpha(static_cast<unsigned char>(d.name[0])) ||
        !std::all_of(d.name.begin(), d.name.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }))
      throw ParamError("invalid proposition name '" + d.name + "'");
    if (!names.insert(d.name).second) throw ParamError("duplicate proposition '" + d.name + "'");
    if (d.locations.empty()) throw ParamError("proposition '" + d.name + "' has no location");
    Proposition p{d.name, w.object(d.object), {}};
    std::vector<std::string> sorted = d.locations;
    std::sort(sorted.begin(), sorted.end());
    for (const auto& l : sorted) p.locations.push_back(w.location(l));
    out.push_back(std::move(p));
  }
  return out;
}

Label label_of(const std::vector<Proposition>& props, const Arrangement& a) {
  std::vector<std::string> holding;
  for (const auto& p : props) {
    if (std::find(p.locations.begin(), p.locations.end(), a[p.object]) != p.locations.end())
      holding.push_back(p.name);
  }
  return Label(std::move(holding));
}

namespace {

std::vector<Outcome> bernoulli(const Arrangement& current, Arrangement success, double p) {
  std::vector<Outcome> out;
  if (p > 0.0) out.push_back({std::move(success), p});
  if (p < 1.0) out.push_back({current, 1.0 - p});
  return out;
}

bool grasp_blocked(const World& w, const Arrangement& s, LocationIndex l) {
  for (LocationIndex up : w.uppers(l))
    if (w.occupancy(s, up) > 0) return true;
  return false;
}

}  // namespace

std::vector<GroundedAction> ground_robot_actions(const World& w, const Arrangement& s) {
  std::vector<GroundedAction> out;
  const auto held = w.held_by_robot(s);
  if (!held) {
    for (std::size_t o = 0; o < w.num_objects(); ++o) {
      const LocationIndex from = s[o];
      if (w.is_gripper(from) || grasp_blocked(w, s, from)) continue;
      Arrangement next = s;
      next.placement[o] = w.robot_gripper();
      GroundedAction a{Actor::Robot, ActionKind::Grasp, static_cast<ObjectIndex>(o), from, w.robot_gripper(),
                       bernoulli(s, std::move(next), w.grasp_success(static_cast<ObjectIndex>(o))),
                       "grasp:" + w.object_name(o) + ":" + w.location_name(from)};
      out.push_back(std::move(a));
    }
    return out;
  }
  const ObjectIndex o = *held;
  for (std::size_t l = 0; l < w.num_locations(); ++l) {
    const auto to = static_cast<LocationIndex>(l);
    if (w.is_gripper(to) || !w.has_room(s, to)) continue;
    if (to == w.else_location() && !w.spec().robot_can_place_else) continue;
    Arrangement next = s;
    next.placement[o] = to;
    out.push_back({Actor::Robot, ActionKind::Place, o, w.robot_gripper(), to,
                   bernoulli(s, std::move(next), w.place_success(o)),
                   "place:" + w.object_name(o) + ":" + w.location_name(to)});
  }
  return out;
}

std::vector<GroundedAction> ground_human_actions(const World& w, const Arrangement& s) {
  std::vector<GroundedAction> out;
  for (std::size_t oi = 0; oi < w.num_objects(); ++oi) {
    const auto o = static_cast<ObjectIndex>(oi);
    const LocationIndex from = s[o];
    if (from == w.robot_gripper()) continue;
    for (std::size_t l = 0; l < w.num_locations(); ++l) {
      const auto to = static_cast<LocationIndex>(l);
      if (to == from || to == w.robot_gripper() || !w.has_room(s, to) || !w.human_may_move(o, from, to)) continue;
      Arrangement next = s;
      next.placement[o] = to;
      out.push_back({Actor::Human, ActionKind::Move, o, from, to, bernoulli(s, std::move(next), w.spec().human_success),
                     "move:" + w.object_name(o) + ":" + w.location_name(from) + ":" + w.location_name(to)});
    }
  }
  out.push_back({Actor::Human, ActionKind::Wait, std::nullopt, 0, 0, {{s, 1.0}}, "wait"});
  return out;
}

Mdp build_mdp(const World& w, const Arrangement& init, const std::vector<PropositionDef>& defs,
              std::size_t max_states) {
  w.check(init);
  const auto props = resolve_propositions(w, defs);

  Mdp m;
  for (const auto& p : props) m.propositions.push_back(p.name);
  std::unordered_map<Arrangement, std::size_t, ArrangementHash> index;
  std::deque<std::size_t> queue;
  const auto lookup = [&](const Arrangement& a) {
    auto [it, inserted] = index.emplace(a, m.states.size());
    if (inserted) {
      if (m.states.size() >= max_states)
        throw CapacityError("MDP exceeds " + std::to_string(max_states) + " states");
      w.check(a);
      m.states.push_back(a);
      m.labeling.push_back(label_of(props, a));
      m.actions.emplace_back();
      m.trans.emplace_back();
      queue.push_back(it->second);
    }
    return it->second;
  };

  m.initial = lookup(init);
  while (!queue.empty()) {
    const std::size_t s = queue.front();
    queue.pop_front();
    auto actions = ground_robot_actions(w, m.states[s]);
    std::vector<std::vector<MdpTransition>> trans;
    for (const auto& a : actions) {
      std::map<std::size_t, double> dist;
      for (const auto& outcome : a.outcomes) dist[lookup(outcome.next)] += outcome.probability;
      std::vector<MdpTransition> row;
      for (const auto& [t, p] : dist) row.push_back({t, p});
      trans.push_back(std::move(row));
    }
    m.actions[s] = std::move(actions);
    m.trans[s] = std::move(trans);
  }
  return m;
}

}  // namespace hrs
