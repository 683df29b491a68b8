#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "spdq/spdq.hpp"
#include "test_support.hpp"

using namespace spdq;
using spdq::testing::params;
using spdq::testing::world_from;

namespace {

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("spdq_io_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST(ResultsCsv, HeaderAndEmptyColumns) {
  SimConfig c;
  c.L = 5;
  c.rho = 0.5;
  c.action_set = ActionSet::Best;
  c.n_mcs = 4;
  c.replicas = 2;
  const auto rows = run_sweep({c, {1.4}, {}, {}});
  std::ostringstream out;
  write_results_csv(out, rows);
  std::istringstream in(out.str());
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header,
            "action_set,L,rho,b,p_d,alpha,gamma,epsilon,n_mcs,replicas,f_C_mean,f_C_stderr,"
            "C_mean,D_mean,M_mean,B_mean,P_mean");
  EXPECT_EQ(row.rfind("best,5,0.5,1.4,0,0.75,0.8,0.15,4,2,", 0), 0u) << row;
  // C_mean, D_mean and P_mean are empty for the Best set
  std::vector<std::string> fields;
  std::stringstream ss(row);
  for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
  if (row.back() == ',') fields.emplace_back();
  ASSERT_EQ(fields.size(), 17u);
  EXPECT_TRUE(fields[12].empty());
  EXPECT_TRUE(fields[13].empty());
  EXPECT_FALSE(fields[14].empty());
  EXPECT_FALSE(fields[15].empty());
  EXPECT_TRUE(fields[16].empty());
}

TEST(ResultsCsv, BitIdenticalForSameSeed) {
  SimConfig c;
  c.L = 8;
  c.rho = 0.6;
  c.action_set = ActionSet::Mobile;
  c.n_mcs = 20;
  c.replicas = 3;
  c.seed = 11;
  SweepSpec spec{c, {}, {0.3, 0.9}, {0.1, 1.0}};
  std::ostringstream a, b;
  write_results_csv(a, run_sweep(spec, {1, {}, {}}));
  write_results_csv(b, run_sweep(spec, {3, {}, {}}));
  EXPECT_EQ(a.str(), b.str());
}

TEST(SeriesCsv, HeaderAndUndefinedCorrelation) {
  std::vector<MetricsRecord> s(1);
  s[0].mcs = 1;
  s[0].f_C = 1.0;
  s[0].action_fraction[index_of(ActionKind::B)] = 1.0;
  std::ostringstream out;
  write_series_csv(out, s);
  EXPECT_EQ(out.str(),
            "mcs,f_C,frac_C,frac_D,frac_M,frac_B,frac_P,corr_C,corr_D,corr_M,corr_B,corr_P\n"
            "1,1,0,0,0,1,0,,,,,\n");
}

TEST(Snapshot, SingleCooperatorOnTwoByTwo) {
  auto w = world_from(2, "C . / . .", params(ActionSet::Best));
  const auto dir = scratch("single");
  const auto paths = dump_snapshot(w, dir, "mcs0");
  EXPECT_EQ(slurp(paths.state), "1 0\n0 0\n");
  EXPECT_EQ(slurp(paths.action), "4 0\n0 0\n");
  std::filesystem::remove_all(dir);
}

TEST(Snapshot, FullDefectorLattice) {
  auto w = world_from(3, "D D D / D D D / D D D", params(ActionSet::Static));
  const Grid g = state_grid(w);
  for (int code : g.codes) EXPECT_EQ(code, 2);
  const Grid a = action_grid(w);
  for (int code : a.codes) EXPECT_EQ(code, 2);
}

TEST(Snapshot, ReadBackRoundTrip) {
  World w(12, 0.55, params(ActionSet::PersistBest, 1.4, 0.15, 0.4), 6);
  for (int t = 0; t < 10; ++t) w.mcs();
  const auto dir = scratch("roundtrip");
  const auto paths = dump_snapshot(w, dir, "mcs10");
  const Grid s = read_grid(paths.state);
  const Grid a = read_grid(paths.action);
  EXPECT_EQ(s, state_grid(w));
  EXPECT_EQ(a, action_grid(w));
  std::size_t occupied = 0;
  for (int code : s.codes) occupied += code != 0;
  EXPECT_EQ(occupied, w.player_count());
  for (const Agent& ag : w.agents()) {
    const SiteIndex site = w.lattice().site_of(ag.site);
    EXPECT_EQ(s.at(site.row, site.col), state_code(ag.strategy));
    EXPECT_EQ(a.at(site.row, site.col), action_code(ag.last_action));
  }
  std::filesystem::remove_all(dir);
}

TEST(Grid, ParseErrors) {
  std::istringstream ragged("1 2\n3\n");
  EXPECT_THROW(parse_grid(ragged), std::runtime_error);
  std::istringstream junk("1 x\n0 0\n");
  EXPECT_THROW(parse_grid(junk), std::runtime_error);
  EXPECT_THROW(read_grid("/nonexistent/grid.txt"), std::runtime_error);
}

TEST(QDump, OneLinePerAgent) {
  auto w = world_from(2, "C D / . .", params(ActionSet::Mobile));
  w.agent(0).q(Strategy::Cooperate, 2) = 0.5;
  std::ostringstream out;
  write_qtables(out, w);
  EXPECT_EQ(out.str(), "0 0 0.5 0 0 0\n0 0 0 0 0 0\n");
}

TEST(Manifest, ListsEveryJob) {
  SimConfig c;
  c.replicas = 2;
  c.seed = 3;
  const auto jobs = plan_jobs({c, {1.2, 1.6}, {}, {}});
  const auto j = manifest_json(jobs);
  ASSERT_EQ(j.size(), 4u);
  EXPECT_EQ(j[3]["cell"], 1);
  EXPECT_EQ(j[3]["replica"], 1);
  EXPECT_EQ(j[3]["seed"], derive_seed(3, 1, 1));
  EXPECT_EQ(j[3]["config"]["b"], "1.6");
}
