#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <string>

#include "rotwave/config.hpp"
#include "rotwave/io.hpp"

using namespace rotwave;

namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("rotwave_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

bool any_error_contains(const ConfigError& e, const std::string& needle) {
  return std::any_of(e.errors().begin(), e.errors().end(),
                     [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

}  // namespace

TEST(Snapshot, RoundTripPreservesValuesAndHeader) {
  const PolarGrid g = build_grid(8, 12);
  const TriField f = random_field(g, -1.0, 1.0, 42);
  const ModelParams p{42.633161, 61.596148, 2.0, 1.0, 5.0, BoundaryCondition::neumann};
  const SnapshotFile s = parse_snapshot(format_snapshot(f, 1.25, p));
  EXPECT_EQ(s.time, 1.25);
  EXPECT_EQ(s.params.mu, p.mu);
  EXPECT_EQ(s.params.beta, p.beta);
  EXPECT_EQ(s.field.grid.n_r, 8);
  EXPECT_EQ(s.field.grid.n_theta, 12);
  for (int c = 0; c < 3; ++c) EXPECT_EQ(s.field.data[c], f.data[c]);
}

TEST(Snapshot, RejectsMalformedInput) {
  const PolarGrid g = build_grid(8, 12);
  const std::string text = format_snapshot(TriField(g, 0.5), 0.0, ModelParams{});
  EXPECT_THROW((void)parse_snapshot(""), InvalidArgument);
  EXPECT_THROW((void)parse_snapshot(text.substr(0, text.size() / 2)), InvalidArgument);
  std::string renamed = text;
  renamed.replace(renamed.find("# u2"), 4, "# u9");
  EXPECT_THROW((void)parse_snapshot(renamed), InvalidArgument);
}

TEST(WriteAtomic, LeavesNoTemporaryFile) {
  const fs::path dir = scratch_dir("atomic");
  const fs::path target = dir / "nested" / "out.txt";
  write_atomic(target, "first");
  write_atomic(target, "second");
  EXPECT_EQ(read_file(target), "second");
  EXPECT_FALSE(fs::exists(fs::path(target.string() + ".tmp")));
  const PolarGrid g = build_grid(8, 12);
  write_snapshot(dir / "snap.txt", TriField(g, 0.1), 2.0, ModelParams{});
  EXPECT_EQ(read_snapshot(dir / "snap.txt").time, 2.0);
  EXPECT_THROW((void)read_file(dir / "missing.txt"), InvalidArgument);
}

TEST(Rounding, FifteenSignificantDigits) {
  EXPECT_EQ(round15(0.1 + 0.2), 0.3);
  EXPECT_EQ(round15(1.0 / 3.0), 0.333333333333333);
  const json j = rounded(json{{"a", 0.1 + 0.2}, {"b", json::array({2.0 / 3.0, 7})}, {"c", "text"}});
  EXPECT_EQ(j["a"].get<double>(), 0.3);
  EXPECT_EQ(j["b"][0].get<double>(), 0.666666666666667);
  EXPECT_EQ(j["b"][1].get<int>(), 7);
  EXPECT_EQ(j["c"].get<std::string>(), "text");
}

TEST(CsvWriter, RowsAndCells) {
  CsvWriter w({"k", "lambda", "bc"});
  w.add_row({cell(2), cell(0.5), cell(std::string_view("neumann"))});
  EXPECT_EQ(w.str(), "k,lambda,bc\n2,0.5,neumann\n");
}

TEST(ParseConfig, ValidReferenceConfig) {
  const RunConfig cfg =
      parse_config("mu = 1.0\nbeta = 1.0\nalpha = 2.0\ngamma = 1.0\nomega = 5.0\nbc = neumann  # comment\n\n");
  EXPECT_EQ(cfg.params.mu, 1.0);
  EXPECT_EQ(cfg.params.omega, 5.0);
  EXPECT_EQ(cfg.params.bc, BoundaryCondition::neumann);
  EXPECT_EQ(cfg.lines.at("omega"), 5);
}

TEST(ParseConfig, AlphaMustExceedGamma) {
  try {
    (void)parse_config("alpha = 1.0\ngamma = 2.0");
    FAIL() << "expected a config error";
  } catch (const ConfigError& e) {
    EXPECT_TRUE(any_error_contains(e, "alpha must exceed gamma"));
  }
}

TEST(ParseConfig, UnknownBc) {
  try {
    (void)parse_config("bc = periodic");
    FAIL() << "expected a config error";
  } catch (const ConfigError& e) {
    EXPECT_TRUE(any_error_contains(e, "line 1: unknown bc"));
  }
}

TEST(ParseConfig, CollectsEveryErrorWithLineNumbers) {
  try {
    (void)parse_config("mu = abc\nzeta = 3\nn_theta = 13\nframe = sideways\nexpected equals");
    FAIL() << "expected a config error";
  } catch (const ConfigError& e) {
    EXPECT_GE(e.errors().size(), 5u);
    EXPECT_TRUE(any_error_contains(e, "line 1: cannot parse value 'abc'"));
    EXPECT_TRUE(any_error_contains(e, "line 2: unknown key 'zeta'"));
    EXPECT_TRUE(any_error_contains(e, "line 3: n_theta"));
    EXPECT_TRUE(any_error_contains(e, "line 4: unknown frame"));
    EXPECT_TRUE(any_error_contains(e, "line 5: expected"));
  }
}

TEST(ParseConfig, ListsAndBooleans) {
  const RunConfig cfg = parse_config("s_values = 0.01, -0.005\nstrict_range = true\nseed = 12\nphi_family = csv");
  ASSERT_EQ(cfg.s_values.size(), 2u);
  EXPECT_EQ(cfg.s_values[1], -0.005);
  EXPECT_TRUE(cfg.strict_range);
  EXPECT_EQ(cfg.seed, 12u);
  EXPECT_EQ(cfg.phi_family, "csv");
  EXPECT_THROW((void)parse_config("strict_range = maybe"), ConfigError);
}

TEST(ParseConfig, DeterministicSummary) {
  const std::string text = "mu = 42.633161\nbeta = 61.596148\nomega = 5\n";
  const RunConfig a = parse_config(text), b = parse_config(text);
  EXPECT_EQ(rounded(params_json(a.params)).dump(), rounded(params_json(b.params)).dump());
}
