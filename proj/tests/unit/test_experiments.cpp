// Copyright 2026 The pfsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "pfsim/experiments.hpp"
#include "test_support.hpp"

using namespace pfsim;
using namespace pfsim::experiments;
using pfsim::testing::MatrixNear;

namespace {

std::filesystem::path fresh_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("pfsim_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

ExperimentConfig config(const std::string& exp) {
  ExperimentConfig c;
  c.experiment = exp;
  return c;
}

}  // namespace

TEST(io, matrix_json_round_trip) {
  std::mt19937_64 rng(1);
  const Operator m = pfsim::testing::random_density(rng).op();
  EXPECT_TRUE(MatrixNear(io::matrix_from_json(io::matrix_to_json(m.matrix())), m.matrix(), 0));
  const json text = json::parse(io::matrix_to_json(m.matrix()).dump());
  EXPECT_TRUE(MatrixNear(io::matrix_from_json(text), m.matrix(), 0));
  EXPECT_THROW(io::matrix_from_json(json{{"real", json::array()}, {"imag", json::array()}}), InvalidArgument);
  EXPECT_THROW(io::matrix_from_json(json{{"real", {{1, 2}, {3}}}, {"imag", {{0, 0}, {0, 0}}}}), InvalidArgument);
}

TEST(io, process_matrix_round_trip) {
  const ProcessMatrix chi = chi_theoretical(dense_braid_gates().Btilde);
  const ProcessMatrix back = io::process_matrix_from_json(json::parse(io::to_json(chi).dump()));
  EXPECT_TRUE(MatrixNear(back.matrix(), chi.matrix(), 0));
}

TEST(io, counts_csv_round_trip_and_errors) {
  const CountTable t = simulate_counts(unitary_probabilities(dense_braid_gates().R2), 5000, 77);
  std::stringstream ss;
  io::write_counts_csv(ss, t);
  const CountTable back = io::read_counts_csv(ss);
  EXPECT_EQ(back.counts, t.counts);
  EXPECT_EQ(back.shots, 5000);
  EXPECT_EQ(back.seed, 77u);

  std::istringstream headless("0,0,5\n");
  EXPECT_THROW(io::read_counts_csv(headless), InvalidArgument);
  std::istringstream short_table("# shots=10\nprep,meas,count\n0,0,5\n");
  EXPECT_THROW(io::read_counts_csv(short_table), InvalidArgument);
  std::istringstream bad_index("# shots=10\nprep,meas,count\n9,0,5\n");
  EXPECT_THROW(io::read_counts_csv(bad_index), InvalidArgument);
}

TEST(io, network_json_round_trip_keeps_transfer) {
  const CompiledRGate c = compile_r_gate(dense_braid_gates().Btilde);
  const OpticalNetwork net = r_gate_network(c.settings);
  const OpticalNetwork back = io::network_from_json(json::parse(io::to_json(net).dump()));
  EXPECT_EQ(back.stages.size(), net.stages.size());
  EXPECT_TRUE(MatrixNear(back.transfer(), net.transfer(), 1e-13));
  json broken = io::to_json(net);
  broken["stages"][0]["kind"] = "mirror";
  EXPECT_THROW(io::network_from_json(broken), InvalidArgument);
}

TEST(config, validation) {
  EXPECT_NO_THROW(config("braid").validate());
  EXPECT_THROW(config("teleport").validate(), InvalidArgument);
  ExperimentConfig c = config("noise");
  c.shots = 100;
  EXPECT_THROW(c.validate(), InvalidArgument);  // no seed
  c.seed = 1;
  EXPECT_NO_THROW(c.validate());
  c.shots = -1;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c.shots = 0;
  c.grid_step = 0.3;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c.grid_step = 0.1;
  c.resamples = 1;
  EXPECT_THROW(c.validate(), InvalidArgument);
  EXPECT_EQ(config("kcbs").echo()["seed"], nullptr);
}

TEST(sample_states, every_logical_component_is_populated) {
  const auto set = SampleStateSet::standard();
  ASSERT_EQ(set.states.size(), 9u);
  for (const auto& s : set.states) {
    const StateVector c = logical_from_operational(s.operational);
    for (Eigen::Index l = 0; l < 3; ++l) EXPECT_GT(std::abs(c[l]), 0.1) << s.name;
    EXPECT_LT(trace_distance(operational_from_logical(c), s.operational), 1e-14);
    const StateVector after = full_braid(c);
    EXPECT_NEAR(relative_phase_change(c, after, 1), 0.0, 1e-9) << s.name;
    EXPECT_NEAR(relative_phase_change(c, after, 2), 2 * kPi / 3, 1e-9) << s.name;
  }
}

TEST(witness_permutation, braid_cycles_witness_labels) {
  const std::array<int, 9> want{1, 2, 0, 5, 3, 4, 6, 7, 8};
  EXPECT_EQ(witness_permutation(dense_braid_gates().Bs), want);
  const std::array<int, 9> id{0, 1, 2, 3, 4, 5, 6, 7, 8};
  EXPECT_EQ(witness_permutation(Operator::identity(3)), id);
}

TEST(witness_permutation, values_follow_the_permutation) {
  std::mt19937_64 rng(99);
  const Operator bs = dense_braid_gates().Bs;
  const auto perm = witness_permutation(bs);
  for (int t = 0; t < 20; ++t) {
    const DensityMatrix rho = pfsim::testing::random_density(rng);
    const auto before = witness_table(rho);
    const auto after = witness_table(rho.conjugated(bs));
    // Tr[A_a rho] = Tr[U A_a U^dag U rho U^dag] = Tr[A_perm(a) rho'].
    for (std::size_t a = 0; a < 9; ++a) {
      EXPECT_NEAR(after[static_cast<std::size_t>(perm[a])], before[a], 1e-10);
    }
  }
}

TEST(estimators, sampled_witnesses_approach_exact_values) {
  const DensityMatrix res = DensityMatrix::pure(resource_state());
  const double m = estimate_magic_witness(simulate_mub_counts(res, 100000000, 5));
  EXPECT_NEAR(m, std::sqrt(3.0) / 2, 1e-3);
  const DensityMatrix k = DensityMatrix::pure(kcbs_state());
  EXPECT_NEAR(estimate_kcbs(simulate_kcbs_counts(k, 100000000, 5)), std::sqrt(5.0), 1e-3);
  EXPECT_EQ(simulate_mub_counts(res, 10, 1).size(), 12u);
  EXPECT_EQ(simulate_kcbs_counts(k, 10, 1).size(), 10u);
}

TEST(reports, compile_report_round_trips) {
  const Report r = run(config("compile"));
  ASSERT_EQ(r.tables.size(), 1u);
  ASSERT_EQ(r.tables[0].rows.size(), 4u);
  for (const auto& row : r.tables[0].rows) EXPECT_LT(row[3].get<double>(), 1e-9) << row[0];
  for (double w : r.body["merge_weights"]["value"]) EXPECT_NEAR(w, 1.0 / 3.0, 1e-14);
}

TEST(reports, braid_report_analytic_fields) {
  const Report r = run(config("braid"));
  EXPECT_LT(r.body["max_entry_error_up_to_phase"]["value"].get<double>(), 1e-9);
  EXPECT_NEAR(r.body["berry_phases_exact"]["value"]["delta_2"].get<double>(), 2 * kPi / 3, 1e-9);
  EXPECT_EQ(r.body["berry_phases_exact"]["provenance"], "analytic");
  EXPECT_GE(r.body["process"]["fidelity_noiseless"]["value"].get<double>(), 0.9999);
  EXPECT_FALSE(r.body["process"].contains("fidelity_sampled"));
  EXPECT_EQ(r.tables[0].rows.size(), 9u);
}

TEST(reports, noise_report_tables_and_crossing) {
  ExperimentConfig c = config("noise");
  c.grid_step = 0.25;
  const Report r = run(c);
  EXPECT_EQ(r.tables.size(), 6u);
  EXPECT_NEAR(r.body["flip_M_at_two_thirds"]["value"].get<double>(), (std::sqrt(3.0) - 2) / 6, 1e-12);
  EXPECT_LT(r.body["flip_kcbs_closed_form_max_deviation"]["value"].get<double>(), 1e-12);
}

TEST(reports, seeded_stochastic_runs_are_reproducible) {
  ExperimentConfig c = config("kcbs");
  c.shots = 10000;
  c.seed = 2024;
  c.grid_step = 0.5;
  c.resamples = 20;
  const std::string a = run(c).body.dump();
  const std::string b = run(c).body.dump();
  EXPECT_EQ(a, b);
  c.seed = 2025;
  EXPECT_NE(run(c).body.dump(), a);
  const json body = json::parse(a);
  EXPECT_EQ(body["K_sampled"]["provenance"], "sampled");
  EXPECT_GT(body["K_sampled"]["value"]["sigma"].get<double>(), 0.0);
}

TEST(output, json_report_and_accumulating_manifest) {
  const auto dir = fresh_dir("json");
  ExperimentConfig c = config("compile");
  c.out_dir = dir;
  const auto files = write_report(run(c), c);
  ASSERT_EQ(files.front(), "compile.json");
  const json doc = json::parse(slurp(dir / "compile.json"));
  EXPECT_EQ(doc["version"], kVersion);
  EXPECT_EQ(doc["config"]["experiment"], "compile");
  EXPECT_TRUE(doc["tables"].contains("round_trip"));

  ExperimentConfig k = config("kcbs");
  k.out_dir = dir;
  k.grid_step = 0.5;
  write_report(run(k), k);
  const json manifest = json::parse(slurp(dir / "manifest.json"));
  EXPECT_TRUE(manifest["runs"].contains("compile"));
  EXPECT_TRUE(manifest["runs"].contains("kcbs"));
  std::filesystem::remove_all(dir);
}

TEST(output, csv_tables_carry_metadata_and_provenance) {
  const auto dir = fresh_dir("csv");
  ExperimentConfig c = config("compile");
  c.out_dir = dir;
  c.format = Format::csv;
  const auto files = write_report(run(c), c);
  ASSERT_EQ(files.size(), 2u);
  std::istringstream in(slurp(dir / "compile_round_trip.csv"));
  std::string meta, prov, header, first;
  std::getline(in, meta);
  std::getline(in, prov);
  std::getline(in, header);
  std::getline(in, first);
  EXPECT_EQ(meta.rfind("# {", 0), 0u);
  EXPECT_EQ(prov, "# provenance: gate=analytic kind=analytic scale=analytic distance=analytic");
  EXPECT_EQ(header, "gate,kind,scale,distance");
  EXPECT_EQ(first.rfind("P1,phase,", 0), 0u);
  std::filesystem::remove_all(dir);
}

TEST(output, csv_cells) {
  EXPECT_EQ(csv_cell(json("x")), "x");
  EXPECT_EQ(csv_cell(json(3)), "3");
  EXPECT_EQ(csv_cell(json(0.1)), "0.10000000000000001");
  EXPECT_EQ(csv_cell(json(true)), "true");
}
