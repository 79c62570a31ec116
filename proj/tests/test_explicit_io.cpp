#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

#include <unistd.h>

#include "hrs/errors.hpp"
#include "hrs/explicit_io.hpp"
#include "hrs/game.hpp"
#include "oracles/random_game.hpp"

using namespace hrs;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path = fs::temp_directory_path() / ("hrs_io_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

// The tiny solver game: s0 robot a -> 0.9 goal / 0.1 s1; s1 human back/quit.
ProductGame tiny_game() {
  GameBuilder b({"x"}, {"goal"});
  b.add_state(Player::Robot, {0}, {});
  b.add_state(Player::Human, {1}, {});
  b.add_state(Player::Robot, {2}, {0});
  b.add_state(Player::Robot, {3}, {});
  b.add_choice(0, "a", {{1, 0.1}, {2, 0.9}});
  b.add_choice(1, "back", {{0, 1.0}});
  b.add_choice(1, "quit", {{3, 1.0}});
  b.add_choice(2, "stay", {{2, 1.0}});
  b.add_choice(3, "stay", {{3, 1.0}});
  return reachability_game(b.finish(0), {false, false, true, false});
}

std::string bundle_text(const fs::path& dir) {
  std::string all;
  for (const char* f : {"model.sta", "model.tra", "model.lab", "model.pla"}) all += slurp(dir / f);
  return all;
}

bool same_targets(const StochasticGame& a, const StochasticGame& b) {
  for (StateIndex s = 0; s < a.num_states(); ++s)
    if (a.is_target(s) != b.is_target(s)) return false;
  return true;
}

bool same_game(const StochasticGame& a, const StochasticGame& b) {
  return a.variables == b.variables && a.valuations == b.valuations && a.players == b.players &&
         a.choice_begin == b.choice_begin && a.choice_action == b.choice_action &&
         a.transition_begin == b.transition_begin && a.transitions == b.transitions && a.initial == b.initial &&
         a.propositions == b.propositions && a.labels == b.labels && same_targets(a, b);
}

/// Exports `g`, applies `edit` to one file and returns the FormatError raised on import.
std::optional<FormatError> corrupt(const StochasticGame& g, const std::string& file,
                                   const std::function<std::string(std::string)>& edit) {
  TempDir dir("bad");
  export_explicit(g, dir.path);
  spit(dir.path / file, edit(slurp(dir.path / file)));
  try {
    import_explicit(dir.path);
  } catch (const FormatError& e) {
    return e;
  }
  return std::nullopt;
}

std::string replace_first(std::string s, const std::string& from, const std::string& to) {
  const auto at = s.find(from);
  REQUIRE(at != std::string::npos);
  return s.replace(at, from.size(), to);
}

}  // namespace

TEST_CASE("single transition file") {
  GameBuilder b({"x"}, {});
  b.add_state(Player::Robot, {0}, {});
  b.add_state(Player::Robot, {1}, {});
  b.add_choice(0, "a0", {{1, 1.0}});
  b.add_choice(1, "stay", {{1, 1.0}});
  auto g = b.finish(0);
  const auto tra = write_tra(g);
  CHECK(tra.rfind("2 2 2\n0 0 1 1 a0\n", 0) == 0);
  // Just the one choice, as in the format definition.
  StochasticGame one;
  one.variables = {"x"};
  one.valuations = {{0}, {1}};
  one.players = {Player::Robot, Player::Robot};
  one.choice_begin = {0, 1, 1};
  one.choice_action = {"a0"};
  one.transition_begin = {0, 1};
  one.transitions = {{1, 1.0}};
  one.labels = {{}, {}};
  CHECK(write_tra(one) == "2 1 1\n0 0 1 1 a0\n");
}

TEST_CASE("probability formatting") {
  CHECK(format_probability(1.0) == "1");
  CHECK(format_probability(0.9) == "0.9");
  CHECK(format_probability(0.1) == "0.1");
  CHECK(format_probability(1.0 / 3.0) == "0.3333333333333333");
  CHECK(std::stod(format_probability(0.1 + 0.2)) == 0.1 + 0.2);
}

TEST_CASE("golden files for the tiny game") {
  const auto pg = tiny_game();
  const fs::path golden = fs::path(HRS_GOLDEN_DIR) / "tiny";
  TempDir dir("golden");
  export_explicit(pg.game, dir.path);
  Strategy strat;
  strat.players = pg.game.players;
  strat.choice = {0, 1, 0, 0};
  export_strategy(pg.game, strat, dir.path);
  if (std::getenv("HRS_UPDATE_GOLDEN")) {
    fs::create_directories(golden);
    for (const char* f : {"model.sta", "model.tra", "model.lab", "model.pla", "model.str"})
      fs::copy_file(dir.path / f, golden / f, fs::copy_options::overwrite_existing);
  }
  for (const char* f : {"model.sta", "model.tra", "model.lab", "model.pla", "model.str"}) {
    CAPTURE(f);
    REQUIRE(fs::exists(golden / f));
    CHECK(slurp(dir.path / f) == slurp(golden / f));
  }
}

TEST_CASE("round trip is byte identical") {
  const auto pg = tiny_game();
  TempDir a("a"), b("b");
  export_explicit(pg.game, a.path);
  const auto back = import_explicit(a.path);
  CHECK(same_game(back, pg.game));
  export_explicit(back, b.path);
  CHECK(bundle_text(a.path) == bundle_text(b.path));
}

TEST_CASE("round trip on random games") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto pg = oracle::random_game(seed);
    TempDir a("ra"), b("rb");
    export_explicit(pg.game, a.path);
    const auto back = import_explicit(a.path);
    CAPTURE(seed);
    CHECK(same_game(back, pg.game));
    export_explicit(back, b.path);
    CHECK(bundle_text(a.path) == bundle_text(b.path));
  }
}

TEST_CASE("round trip on a manipulation game") {
  WorldSpec w;
  w.objects = {"O1", "O2"};
  w.locations = {"robot_gripper", "human_gripper", "else", "L1", "L2"};
  w.robot_success = {0.9, 0.7};
  const World world(w);
  const auto mg = build_game(world, world.arrangement({{"O1", "else"}, {"O2", "L2"}}), {{"p", "O1", {"L1"}}},
                             ProbTermination{0.05});
  TempDir a("m");
  export_explicit(mg.game, a.path);
  CHECK(same_game(import_explicit(a.path), mg.game));
}

TEST_CASE("strategy file") {
  const auto pg = tiny_game();
  TempDir dir("str");
  Strategy strat;
  strat.players = pg.game.players;
  strat.choice = {0, 1, 0, -1};
  export_strategy(pg.game, strat, dir.path);
  CHECK(slurp(dir.path / "model.str") == "0 a\n1 quit\n2 stay\n");
  const auto back = import_strategy(pg.game, dir.path);
  CHECK(back.choice == strat.choice);
  spit(dir.path / "model.str", "0 a\n1 jump\n");
  CHECK_THROWS_AS(import_strategy(pg.game, dir.path), FormatError);
}

TEST_CASE("malformed bundles are rejected with a location") {
  const auto g = tiny_game().game;

  SUBCASE("header count mismatch") {
    const auto e = corrupt(g, "model.tra", [](std::string s) { return replace_first(s, "4 5 6", "4 5 7"); });
    REQUIRE(e);
    CHECK(e->file() == "model.tra");
    CHECK(e->line() == 1);
  }
  SUBCASE("probability mass") {
    const auto e = corrupt(g, "model.tra", [](std::string s) { return replace_first(s, "0 0 2 0.9 a", "0 0 2 0.4 a"); });
    REQUIRE(e);
    CHECK(e->line() == 2);
    CHECK(std::string(e->what()).find("(0, 0)") != std::string::npos);
  }
  SUBCASE("dangling target") {
    const auto e = corrupt(g, "model.tra", [](std::string s) { return replace_first(s, "1 0 0 1 back", "1 0 9 1 back"); });
    REQUIRE(e);
    CHECK(e->line() == 4);
  }
  SUBCASE("garbage number") {
    const auto e = corrupt(g, "model.tra", [](std::string s) { return replace_first(s, "0.1 a", "zero a"); });
    REQUIRE(e);
    CHECK(e->line() == 2);
  }
  SUBCASE("player out of range") {
    const auto e = corrupt(g, "model.pla", [](std::string s) { return replace_first(s, "1 2", "1 3"); });
    REQUIRE(e);
    CHECK(e->file() == "model.pla");
    CHECK(e->line() == 2);
  }
  SUBCASE("state index out of order") {
    const auto e = corrupt(g, "model.sta", [](std::string s) { return replace_first(s, "2:(2)", "5:(2)"); });
    REQUIRE(e);
    CHECK(e->file() == "model.sta");
    CHECK(e->line() == 4);
  }
  SUBCASE("unknown label id") {
    const auto e = corrupt(g, "model.lab", [](std::string s) { return replace_first(s, "2: 1 2", "2: 1 7"); });
    REQUIRE(e);
    CHECK(e->file() == "model.lab");
    CHECK(e->line() == 3);
  }
}

TEST_CASE("names with whitespace cannot be written") {
  GameBuilder b({"x"}, {});
  b.add_state(Player::Robot, {0}, {});
  b.add_choice(0, "two words", {{0, 1.0}});
  TempDir dir("ws");
  CHECK_THROWS_AS(export_explicit(b.finish(0), dir.path), ParamError);
}

TEST_CASE("missing files") {
  TempDir dir("missing");
  CHECK_THROWS_AS(import_explicit(dir.path), IoError);
}
