#include "otpsim/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "otpsim/attack.hpp"
#include "otpsim/cseq.hpp"
#include "otpsim/impossibility.hpp"
#include "otpsim/lossy.hpp"
#include "otpsim/stateful.hpp"

namespace otpsim {

namespace {

int pick(int override_value, int fallback) {
  return override_value > 0 ? override_value : fallback;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

CheckOutcome bounded(double measured, double bound) {
  return {measured, bound, measured <= bound};
}

// ---------------------------------------------------------------------------
// seq

CheckOutcome seq_involution(Rng& rng, const ExperimentConfig& cfg) {
  double worst = 0.0;
  int trials = pick(cfg.trials, 10);
  for (int i = 0; i < trials; ++i) {
    int q = 1 + int(rng() % 2), a = int(rng() % 3);
    ChannelDilation ch{q, a, random_unitary(q + a, rng)};
    Mat s = build_seq_matrix(ch).to_dense();
    const auto dim = s.rows();
    worst = std::max(worst,
                     max_abs_diff(Mat(s * s), Mat::Identity(dim, dim)));
    worst = std::max(worst, max_abs_diff(Mat(s.adjoint()), s));
  }
  return bounded(worst, 1e-10);
}

CheckOutcome seq_hiding(Rng& rng, const ExperimentConfig& cfg) {
  double worst = 0.0;
  int pairs = pick(cfg.trials, 5);
  for (int i = 0; i < pairs; ++i) {
    ChannelDilation ch{1, 2, random_unitary(3, rng)};
    ChannelDilation other = twirl_dilation(ch, random_unitary(2, rng));
    std::vector<AdversaryScript> scripts;
    for (int s = 0; s < 5; ++s)
      scripts.push_back(random_script(1, 1, 3, 3, rng));
    worst = std::max(worst, check_dilation_hiding(ch, other, 1, scripts));
  }
  return bounded(worst, 1e-9);
}

CheckOutcome seq_sim_prime(Rng& rng, const ExperimentConfig& cfg) {
  double worst = 0.0;
  int trials = pick(cfg.trials, 5);
  for (int i = 0; i < trials; ++i) {
    ChannelDilation ch{2, 1, random_unitary(3, rng)};
    TestableProgram prog = testable_from_dilation(ch, 1, 1);
    std::vector<AdversaryScript> scripts;
    for (int s = 0; s < 5; ++s)
      scripts.push_back(random_script(1, 2, 3, 3, rng));
    worst = std::max(worst, check_sim_prime(ch, prog, 1, scripts));
  }
  return bounded(worst, 1e-9);
}

// ---------------------------------------------------------------------------
// cseq

CheckOutcome cseq_involution(Rng& rng, const ExperimentConfig&) {
  RandomizedFunction f = RandomizedFunction::random(1, 1, 1, rng);
  double worst = 0.0;
  for (const UnitaryOp& op : {phi_f_program(f), cseq_query_op(f)}) {
    Mat m = op.to_dense();
    const auto dim = m.rows();
    worst = std::max(worst,
                     max_abs_diff(Mat(m * m), Mat::Identity(dim, dim)));
    worst = std::max(worst, max_abs_diff(Mat(m.adjoint()), m));
  }
  return bounded(worst, 1e-10);
}

CheckOutcome cseq_hybrids(Rng& rng, const ExperimentConfig& cfg) {
  RandomizedFunction f = RandomizedFunction::random(1, 1, 1, rng);
  std::vector<AdversaryScript> scripts;
  int count = pick(cfg.trials, 3);
  for (int i = 0; i < count; ++i)
    scripts.push_back(random_cseq_script(1, f, 3, 2, rng));
  OracleSpec h0 = cseq_oracle(f, 1);
  OracleSpec h1 = hybrid1_oracle(f, 1);
  OracleSpec h2 = hybrid2_oracle(f, 1);
  OracleSpec h3 = cseq_sim_oracle(canonical_program(f), 1, 1, 1);
  double worst = compare_oracles(h0, h1, scripts);
  worst = std::max(worst, compare_oracles(h1, h2, scripts));
  worst = std::max(worst, compare_oracles(h2, h3, scripts));
  return bounded(worst, 1e-9);
}

CheckOutcome cseq_cross_1(Rng& rng, const ExperimentConfig& cfg) {
  RandomizedFunction f = RandomizedFunction::random(1, 1, 1, rng);
  std::vector<AdversaryScript> scripts;
  int count = pick(cfg.trials, 2);
  for (int i = 0; i < count; ++i)
    scripts.push_back(random_cseq_script(1, f, 2, 2, rng));
  OracleSpec real = cseq_oracle(f, 1);
  OracleSpec sim = cseq_sim_oracle(seq_as_program(f), 1, 1, 1);
  return bounded(compare_oracles(real, sim, scripts), 1e-9);
}

CheckOutcome cseq_cross_2(Rng& rng, const ExperimentConfig& cfg) {
  RandomizedFunction f = RandomizedFunction::random(1, 1, 1, rng);
  SeqOracle real = SeqOracle::canonical(build_phi_f(f));
  SeqOracle sim = SeqOracle::sim_prime(cseq_as_program(f), 3);
  double worst = 0.0;
  int count = pick(cfg.trials, 2);
  for (int i = 0; i < count; ++i) {
    AdversaryScript s = random_script(1, 3, 2, 2, rng);
    worst = std::max(worst, trace_distance(run_script(real, 1, s),
                                           run_script(sim, 1, s)));
  }
  return bounded(worst, 1e-9);
}

// ---------------------------------------------------------------------------
// lossy

CheckOutcome lossy_ga_perfect(Rng& rng, const ExperimentConfig&) {
  GroupActionKey key = ga_gen(GaMode::lossy, 7, rng);
  return bounded(lossiness_audit(key)[0][1], 0.0);
}

CheckOutcome lossy_ga_correct(Rng& rng, const ExperimentConfig&) {
  GroupActionKey key = ga_gen(GaMode::inj, 7, rng);
  int errors = 0;
  for (int m = 0; m < 2; ++m)
    for (std::uint32_t u = 0; u < 7; ++u) {
      auto got = ga_dec(key, ga_enc(key, m, u));
      if (!got || *got != m) ++errors;
    }
  return bounded(errors, 0.0);
}

CheckOutcome lossy_ltf_correct(Rng& rng, const ExperimentConfig& cfg) {
  int n = pick(cfg.n, 8);
  ToyLtfKey key = ltf_gen(LtfMode::inj, n, 1, rng);
  int errors = 0;
  for (std::uint32_t x = 0; x < (1u << n); ++x)
    if (ltf_invert(key, ltf_eval(key, x)) != x) ++errors;
  return bounded(errors, 0.0);
}

CheckOutcome lossy_pke_tv(Rng& rng, const ExperimentConfig&) {
  LossyPkeKey key = pke_gen(LtfMode::lossy, 8, 4, 2, rng);
  auto tv = lossiness_audit(key);
  double worst = 0.0;
  for (std::size_t i = 0; i < tv.size(); ++i)
    for (std::size_t j = 0; j < tv.size(); ++j)
      if (i != j) worst = std::max(worst, tv[i][j]);
  return bounded(worst, crooked_lhl_bound(8, 2, 4));
}

CheckOutcome lossy_pip_count(Rng&, const ExperimentConfig&) {
  int worst = 0;
  for (std::uint32_t x = 0; x < 4; ++x)
    for (std::uint32_t xp = 0; xp < 4; ++xp)
      for (std::uint32_t y = 0; y < 4; ++y)
        for (std::uint32_t yp = 0; yp < 4; ++yp) {
          if (x == xp || y == yp) continue;
          int count = 0;
          for (std::uint32_t a = 1; a < 4; ++a)
            for (std::uint32_t b = 0; b < 4; ++b) {
              PipKey key = pip_key(2, a, b);
              if (pip_eval(key, x) == y && pip_eval(key, xp) == yp) ++count;
            }
          worst = std::max(worst, std::abs(count - 1));
        }
  return bounded(worst, 0.0);
}

// ---------------------------------------------------------------------------
// impossibility

CheckOutcome imp_constant(Rng& rng, const ExperimentConfig&) {
  double worst = 0.0;
  for (int n = 1; n <= 3; ++n) {
    FamilyMember member = family_constant(n, rng);
    worst = std::max(worst, adversary_prob_of_1(fresh_program(member)));
  }
  return bounded(worst, 1e-12);
}

CheckOutcome imp_injective(Rng& rng, const ExperimentConfig&) {
  double worst = 0.0;
  for (int n = 1; n <= 3; ++n) {
    FamilyMember member = family_injective(n, rng);
    double p1 = adversary_prob_of_1(fresh_program(member));
    worst = std::max(worst, std::abs(p1 - (1.0 - std::ldexp(1.0, -n))));
  }
  return bounded(worst, 1e-10);
}

CheckOutcome imp_projector(Rng& rng, const ExperimentConfig&) {
  double worst = 0.0;
  for (int n = 1; n <= 3; ++n) {
    FamilyMember member = family_injective(n, rng);
    double norm = projector_norm(member.f, member.support);
    worst = std::max(worst, std::abs(norm - std::ldexp(1.0, -n)));
  }
  return bounded(worst, 1e-10);
}

CheckOutcome imp_lossy_tv(Rng& rng, const ExperimentConfig&) {
  FamilyMember member = family_lossy(2, rng);
  return bounded(max_output_tv(fresh_program(member), mixture_program(member)),
                 1e-12);
}

CheckOutcome imp_lossy_gap(Rng& rng, const ExperimentConfig&) {
  FamilyMember member = family_lossy(2, rng);
  double gap = adversary_prob_of_1(fresh_program(member)) -
               adversary_prob_of_1(mixture_program(member));
  return {gap, 0.5, gap >= 0.5};
}

// ---------------------------------------------------------------------------
// attack

RandomizedFunction quarter_function() {
  RandomizedFunction f;
  f.n_x = 1;
  f.n_r = 2;
  f.n_y = 1;
  f.table = {0, 0, 0, 1, 0, 0, 0, 1};
  return f;
}

MwVerifier quarter_verifier() {
  TestableProgram prog = canonical_program(quarter_function());
  Mat e = Mat::Zero(2, 2);
  e(1, 1) = 1.0;
  return estimation_verifier(prog, 1, e);
}

CheckOutcome attack_mw_law(Rng&, const ExperimentConfig&) {
  MwVerifier v = quarter_verifier();
  TestableProgram prog = canonical_program(quarter_function());
  double worst = 0.0;
  for (int n = 1; n <= 4; ++n) {
    auto dist = mw_branch_distribution(v, prog.program_state, n);
    for (const auto& [z, prob] : dist) {
      int w = 0;
      for (char c : z) w += (c == '1');
      worst = std::max(
          worst, std::abs(prob - std::pow(0.25, w) * std::pow(0.75, n - w)));
    }
  }
  return bounded(worst, 1e-9);
}

CheckOutcome attack_hoeffding(Rng& rng, const ExperimentConfig& cfg) {
  MwVerifier v = quarter_verifier();
  TestableProgram prog = canonical_program(quarter_function());
  const int m0 = 2000;
  const double alpha = 0.05;
  int seeds = pick(cfg.trials, 50);
  int violations = 0;
  for (int i = 0; i < seeds; ++i) {
    MwRun run = mw_rounds(v, prog.program_state, m0, rng);
    int s = 0;
    for (int b : run.bits) s += b;
    if (std::abs(double(s) / m0 - 0.25) > alpha) ++violations;
  }
  double q = 2.0 * std::exp(-2.0 * m0 * alpha * alpha);
  double bound = q + 3.0 * std::sqrt(q * (1 - q) / seeds);
  return bounded(double(violations) / seeds, bound);
}

CheckOutcome attack_laplace(Rng& rng, const ExperimentConfig& cfg) {
  AttackParams p = derive_params(0.2, 0.1, 4);
  double q = std::exp(-p.alpha * p.m0 / (4.0 * p.sigma));
  int draws = pick(cfg.trials, 20000);
  int failures = 0;
  for (int i = 0; i < draws; ++i)
    if (std::abs(sample_laplace(p.sigma, rng)) > p.alpha * p.m0 / 4)
      ++failures;
  double se = std::sqrt(q * (1 - q) / draws);
  return bounded(std::abs(double(failures) / draws - q), 3 * se);
}

struct AttackTally {
  int runs = 0, completed = 0, calls = 0, gentle = 0;
  double worst_err = 0.0;
};

AttackTally attack_tally(Rng& rng, int runs) {
  RandomizedFunction f{1, 1, 1, {0, 0, 0, 1}};
  TestableProgram prog = canonical_program(f);
  Mat z = Mat::Zero(2, 2);
  z(0, 0) = 1.0;
  z(1, 1) = -1.0;
  std::vector<Mat> obs = {z, Mat::Identity(2, 2)};
  std::vector<std::uint64_t> inputs = {0, 1};
  AttackTally tally;
  tally.runs = runs;
  for (int i = 0; i < runs; ++i) {
    Rng run_rng(rng());
    AttackReport rep =
        multi_observable_attack(prog, inputs, obs, 0.2, 0.1, run_rng);
    if (!rep.success) continue;
    ++tally.completed;
    for (const auto& call : rep.calls) {
      ++tally.calls;
      tally.worst_err =
          std::max(tally.worst_err, std::abs(call.estimate - call.truth));
      if (call.disturbance <= rep.params.tau) ++tally.gentle;
    }
  }
  return tally;
}

CheckOutcome attack_accuracy(Rng& rng, const ExperimentConfig& cfg) {
  AttackTally tally = attack_tally(rng, pick(cfg.trials, 10));
  double fail_rate = 1.0 - double(tally.completed) / tally.runs;
  bool pass = tally.worst_err <= 0.2 && fail_rate <= 0.2;
  return {tally.worst_err, 0.2, pass};
}

CheckOutcome attack_gentleness(Rng& rng, const ExperimentConfig& cfg) {
  AttackTally tally = attack_tally(rng, pick(cfg.trials, 10));
  double rough =
      tally.calls == 0 ? 1.0 : 1.0 - double(tally.gentle) / tally.calls;
  return bounded(rough, 0.05);
}

// ---------------------------------------------------------------------------
// stateful

CheckOutcome stateful_distinguisher(Rng&, const ExperimentConfig&) {
  StatefulProgram count = counting_program(2);
  StatefulProgram constant = constant_program(2, 1);
  QueryScript one{0, {{StepKind::forward, {}, {}}}};
  QueryScript two{0, {{StepKind::forward, {}, {}}, {StepKind::forward, {}, {}}}};
  double d1 = functional_equiv(count, constant, {one});
  double d2 = functional_equiv(count, constant, {two});
  return bounded(std::max(d1, std::abs(d2 - 1.0)), 1e-9);
}

CheckOutcome stateful_qas(Rng& rng, const ExperimentConfig&) {
  Vec psi = random_state(1, rng);
  double worst = 0.0;
  for (std::uint64_t x = 0; x < 8; ++x)
    for (std::uint64_t z = 0; z < 8; ++z) {
      QasKey key{1, 2, x, z};
      Vec enc = qas_enc(key, psi);
      worst = std::max(worst, std::abs(qas_ver_prob(key, enc) - 1.0));
      QasDecResult dec = qas_dec(key, enc, rng);
      if (!dec.accept)
        worst = 1.0;
      else
        worst = std::max(worst, (dec.state - psi).norm());
    }
  return bounded(worst, 1e-12);
}

CheckOutcome stateful_tamper(Rng& rng, const ExperimentConfig&) {
  Vec psi = random_state(1, rng);
  int detected = 0;
  for (std::uint64_t ax = 0; ax < 8; ++ax)
    for (std::uint64_t az = 0; az < 8; ++az) {
      if (ax == 0 && az == 0) continue;
      QasKey key{1, 2, rng() & 7, rng() & 7};
      QasKey attack{3, 0, ax, az};
      Vec hit = qas_mask_matrix(attack) * qas_enc(key, psi);
      if (qas_ver_prob(key, hit) < 1e-12) ++detected;
    }
  return bounded(std::abs(detected - 48), 0.0);
}

CheckOutcome stateful_obf_equiv(Rng& rng, const ExperimentConfig& cfg) {
  double worst = 0.0;
  int trials = pick(cfg.trials, 5);
  for (int i = 0; i < trials; ++i) {
    StatefulProgram prog = random_stateful(2, 2, rng);
    StatefulProgram obf = stateful_obfuscate(prog, 2, rng);
    std::vector<QueryScript> scripts;
    for (int s = 0; s < 3; ++s)
      scripts.push_back(random_stateful_script(1, 2, 2, 3, rng));
    worst = std::max(worst, functional_equiv(prog, obf, scripts));
  }
  return bounded(worst, 1e-9);
}

CheckOutcome stateful_inert(Rng& rng, const ExperimentConfig&) {
  StatefulProgram prog = counting_program(1);
  StatefulProgram obf = stateful_obfuscate(prog, 2, rng);
  Mat dense = obf.u.to_dense();
  Mat id = Mat::Identity(dense.rows(), dense.cols());
  double worst = 0.0;
  int inert = 0;
  for (std::int64_t col = 0; col < dense.cols(); ++col) {
    double dev = (dense.col(col) - id.col(col)).norm();
    if (dev < 1e-10) ++inert;
  }
  // 2 valid hidden states of 8, times 2 query values, always move.
  worst = std::abs(inert - 12);
  return bounded(worst, 0.0);
}

}  // namespace

const std::vector<CheckDef>& check_registry() {
  static const std::vector<CheckDef> registry = {
      {"seq", "oracle_involution", "CSEQ-oracle", seq_involution},
      {"seq", "dilation_hiding", "cseq-sim-equals-cseq-canonical", seq_hiding},
      {"seq", "sim_prime_equiv", "Sim-prime-equivalent-to-SEQ-oracle",
       seq_sim_prime},
      {"cseq", "query_involution", "U-Phi-f-involution", cseq_involution},
      {"cseq", "hybrid_chain", "sim-for-CSEQ", cseq_hybrids},
      {"cseq", "channel_as_program", "cseq-seq-equivalence", cseq_cross_1},
      {"cseq", "classical_as_program", "cseq-seq-equivalence", cseq_cross_2},
      {"lossy", "group_action_perfect_lossiness", "lossy-pke-group-actions",
       lossy_ga_perfect},
      {"lossy", "group_action_decryption", "lossy-pke-group-actions",
       lossy_ga_correct},
      {"lossy", "ltf_injective_inversion", "lossy-tdf-from-LWE",
       lossy_ltf_correct},
      {"lossy", "pke_lossy_tv_bound", "crooked-leftover-hash-lemma",
       lossy_pke_tv},
      {"lossy", "pairwise_independence_count", "crooked-leftover-hash-lemma",
       lossy_pip_count},
      {"impossibility", "constant_family_passes", "A-c-outputs-0",
       imp_constant},
      {"impossibility", "injective_family_fails", "A-e-outputs-1",
       imp_injective},
      {"impossibility", "projector_norm_exact", "A-e-outputs-1",
       imp_projector},
      {"impossibility", "lossy_one_time_tv", "d-is-lossy", imp_lossy_tv},
      {"impossibility", "lossy_reuse_gap", "d-is-lossy", imp_lossy_gap},
      {"attack", "mw_product_law", "mw-empirical-estimator", attack_mw_law},
      {"attack", "hoeffding_envelope", "mw-empirical-estimator",
       attack_hoeffding},
      {"attack", "laplace_failure_rate", "laplace-gentle", attack_laplace},
      {"attack", "estimate_accuracy", "many-observables-attack",
       attack_accuracy},
      {"attack", "gentle_disturbance", "laplace-gentle", attack_gentleness},
      {"stateful", "counting_distinguisher", "stateful-io",
       stateful_distinguisher},
      {"stateful", "qas_roundtrip", "ideal-sqO", stateful_qas},
      {"stateful", "qas_tamper_detection", "ideal-sqO", stateful_tamper},
      {"stateful", "obfuscation_equivalence", "ideal-sqO",
       stateful_obf_equiv},
      {"stateful", "invalid_branch_inert", "ideal-sqO", stateful_inert},
  };
  return registry;
}

std::uint64_t check_seed(const std::string& suite, const std::string& name,
                         std::uint64_t seed) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](std::uint64_t byte) {
    h ^= byte;
    h *= 1099511628211ull;
  };
  for (char c : suite) mix(std::uint64_t(std::uint8_t(c)));
  mix('/');
  for (char c : name) mix(std::uint64_t(std::uint8_t(c)));
  for (int i = 0; i < 8; ++i) mix((seed >> (8 * i)) & 0xff);
  return h;
}

std::vector<ResultRecord> run_suite(const ExperimentConfig& config) {
  static const std::vector<std::string> known = {
      "seq", "cseq", "lossy", "impossibility", "attack", "stateful", "all"};
  if (std::find(known.begin(), known.end(), config.suite) == known.end())
    throw precondition_error("unknown suite: " + config.suite);

  std::vector<const CheckDef*> selected;
  for (const auto& def : check_registry())
    if (config.suite == "all" || config.suite == def.suite)
      selected.push_back(&def);

  std::vector<ResultRecord> records(selected.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::size_t idx = next.fetch_add(1);
      if (idx >= selected.size()) return;
      const CheckDef& def = *selected[idx];
      Rng rng(check_seed(def.suite, def.name, config.seed));
      auto start = std::chrono::steady_clock::now();
      CheckOutcome outcome;
      try {
        outcome = def.fn(rng, config);
      } catch (const sim_error& e) {
        std::cerr << def.suite << "/" << def.name << " errored: " << e.what()
                  << "\n";
        outcome = {1.0, 0.0, false};
      }
      auto elapsed = std::chrono::steady_clock::now() - start;
      ResultRecord rec;
      rec.suite = def.suite;
      rec.check_name = def.name;
      rec.paper_anchor = def.anchor;
      rec.measured = outcome.measured;
      rec.bound = outcome.bound;
      rec.pass = outcome.pass;
      rec.runtime_ms =
          std::chrono::duration_cast<std::chrono::milliseconds>(elapsed)
              .count();
      records[idx] = rec;
    }
  };
  int jobs = std::max(1, config.jobs);
  std::vector<std::thread> threads;
  for (int i = 1; i < jobs; ++i) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();

  std::sort(records.begin(), records.end(),
            [](const ResultRecord& a, const ResultRecord& b) {
              return std::tie(a.suite, a.check_name) <
                     std::tie(b.suite, b.check_name);
            });
  return records;
}

std::string render_json(const std::vector<ResultRecord>& records) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& rec : records) {
    nlohmann::json row;
    row["suite"] = rec.suite;
    row["check_name"] = rec.check_name;
    row["paper_anchor"] = rec.paper_anchor;
    row["measured"] = rec.measured;
    row["bound"] = rec.bound;
    row["pass"] = rec.pass;
    row["runtime_ms"] = 0;
    out.push_back(row);
  }
  return out.dump(2) + "\n";
}

std::string render_csv(const std::vector<ResultRecord>& records) {
  std::string out = "suite,check_name,paper_anchor,measured,bound,pass,runtime_ms\n";
  for (const auto& rec : records) {
    out += rec.suite + "," + rec.check_name + "," + rec.paper_anchor + "," +
           fmt(rec.measured) + "," + fmt(rec.bound) + "," +
           (rec.pass ? "true" : "false") + ",0\n";
  }
  return out;
}

int cli_main(int argc, char** argv) {
  CLI::App app{"exact-simulation experiment suites"};
  ExperimentConfig config;
  app.add_option("--suite", config.suite,
                 "seq|cseq|lossy|impossibility|attack|stateful|all");
  app.add_option("--seed", config.seed, "randomness seed");
  app.add_option("--out", config.out_path, "report path (default stdout)");
  app.add_option("--format", config.format, "json|csv");
  app.add_option("--jobs", config.jobs, "parallel check workers");
  app.add_option("--n", config.n, "per-suite width override");
  app.add_option("--trials", config.trials, "per-suite trial override");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  if (config.format != "json" && config.format != "csv") {
    std::cerr << "unknown format: " << config.format << "\n";
    return 2;
  }

  std::vector<ResultRecord> records;
  try {
    records = run_suite(config);
  } catch (const precondition_error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  std::string report =
      config.format == "json" ? render_json(records) : render_csv(records);
  if (config.out_path.empty()) {
    std::cout << report;
  } else {
    std::ofstream out(config.out_path, std::ios::binary);
    if (!out) {
      std::cerr << "cannot open " << config.out_path << "\n";
      return 2;
    }
    out << report;
  }

  bool all_pass = true;
  for (const auto& rec : records) {
    std::cerr << rec.suite << "/" << rec.check_name << ": "
              << (rec.pass ? "pass" : "FAIL") << " (" << rec.runtime_ms
              << " ms)\n";
    if (!rec.pass) all_pass = false;
  }
  return all_pass ? 0 : 1;
}

}  // namespace otpsim
