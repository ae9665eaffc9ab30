// Acceptance gate: one criterion per command-line argument (1-12), one
// PASS/FAIL line each; with no argument every criterion runs. Exit code 0
// only when everything selected passed.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "otpsim/attack.hpp"
#include "otpsim/cli.hpp"
#include "otpsim/cseq.hpp"
#include "otpsim/impossibility.hpp"
#include "otpsim/lossy.hpp"
#include "otpsim/stateful.hpp"

using namespace otpsim;

namespace {

bool check(bool ok, const char* what, double measured, double bound) {
  if (!ok)
    std::printf("    %s: measured %.3e vs bound %.3e\n", what, measured,
                bound);
  return ok;
}

// 1: the oracle unitary is a self-adjoint involution.
bool criterion_1() {
  Rng rng(check_seed("acceptance", "involution", 0));
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    int q = 1 + int(rng() % 2), a = int(rng() % 3);
    ChannelDilation ch{q, a, random_unitary(q + a, rng)};
    Mat s = build_seq_matrix(ch).to_dense();
    const auto dim = s.rows();
    worst = std::max(worst, max_abs_diff(Mat(s * s), Mat::Identity(dim, dim)));
    worst = std::max(worst, max_abs_diff(Mat(s.adjoint()), s));
  }
  return check(worst < 1e-10, "involution deviation", worst, 1e-10);
}

// 2: dilations of one channel are indistinguishable behind the oracle.
bool criterion_2() {
  Rng rng(check_seed("acceptance", "hiding", 0));
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    int q = 1 + int(rng() % 2), a = 1 + int(rng() % 2);
    ChannelDilation ch{q, a, random_unitary(q + a, rng)};
    ChannelDilation other = twirl_dilation(ch, random_unitary(a, rng));
    std::vector<AdversaryScript> scripts;
    for (int s = 0; s < 20; ++s)
      scripts.push_back(random_script(1, q, 4, 1 + int(rng() % 5), rng));
    worst = std::max(worst, check_dilation_hiding(ch, other, 1, scripts));
  }
  return check(worst <= 1e-9, "hiding distance", worst, 1e-9);
}

// 3: the program-state simulator equals the oracle.
bool criterion_3() {
  Rng rng(check_seed("acceptance", "sim_prime", 0));
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    int q = 1 + int(rng() % 2), a = 1 + int(rng() % 2);
    ChannelDilation ch{q, a, random_unitary(q + a, rng)};
    TestableProgram prog = testable_from_dilation(ch, q - 1, 1);
    std::vector<AdversaryScript> scripts;
    for (int s = 0; s < 20; ++s)
      scripts.push_back(random_script(1, q, 4, 1 + int(rng() % 5), rng));
    worst = std::max(worst, check_sim_prime(ch, prog, 1, scripts));
  }
  return check(worst <= 1e-9, "simulator distance", worst, 1e-9);
}

// 4: hybrid chain from the classical oracle to Sim'(P_f).
bool criterion_4() {
  Rng rng(check_seed("acceptance", "hybrids", 0));
  RandomizedFunction f = RandomizedFunction::random(1, 1, 1, rng);
  std::vector<AdversaryScript> scripts;
  for (int i = 0; i < 20; ++i)
    scripts.push_back(random_cseq_script(1, f, 3, 2, rng));
  OracleSpec h0 = cseq_oracle(f, 1);
  OracleSpec h1 = hybrid1_oracle(f, 1);
  OracleSpec h2 = hybrid2_oracle(f, 1);
  OracleSpec h3 = cseq_sim_oracle(canonical_program(f), 1, 1, 1);
  double worst = compare_oracles(h0, h1, scripts);
  worst = std::max(worst, compare_oracles(h1, h2, scripts));
  worst = std::max(worst, compare_oracles(h2, h3, scripts));
  return check(worst <= 1e-9, "hybrid distance", worst, 1e-9);
}

// 5: both cross-simulation adapters, and the domain-size precondition.
bool criterion_5() {
  Rng rng(check_seed("acceptance", "cross", 0));
  RandomizedFunction f = RandomizedFunction::random(1, 1, 1, rng);
  std::vector<AdversaryScript> scripts;
  for (int i = 0; i < 15; ++i)
    scripts.push_back(random_cseq_script(1, f, 2, 2, rng));
  OracleSpec real = cseq_oracle(f, 1);
  OracleSpec sim = cseq_sim_oracle(seq_as_program(f), 1, 1, 1);
  double worst = compare_oracles(real, sim, scripts);
  bool ok = check(worst <= 1e-9, "adapter 1 distance", worst, 1e-9);

  SeqOracle chan = SeqOracle::canonical(build_phi_f(f));
  SeqOracle chan_sim = SeqOracle::sim_prime(cseq_as_program(f), 3);
  double worst2 = 0.0;
  for (int i = 0; i < 15; ++i) {
    AdversaryScript s = random_script(1, 3, 2, 2, rng);
    worst2 = std::max(worst2, trace_distance(run_script(chan, 1, s),
                                             run_script(chan_sim, 1, s)));
  }
  ok &= check(worst2 <= 1e-9, "adapter 2 distance", worst2, 1e-9);

  RandomizedFunction tiny = RandomizedFunction::random(0, 1, 1, rng);
  bool threw = false;
  try {
    cseq_as_program(tiny);
  } catch (const precondition_error&) {
    threw = true;
  }
  ok &= check(threw, "single-input rejection", threw ? 0 : 1, 0);
  return ok;
}

// 6: lossy encryption, three instantiations.
bool criterion_6() {
  Rng rng(check_seed("acceptance", "lossy", 0));
  bool ok = true;

  GroupActionKey lossy_key = ga_gen(GaMode::lossy, 7, rng);
  double tv = lossiness_audit(lossy_key)[0][1];
  ok &= check(tv == 0.0, "group-action lossy TV", tv, 0.0);
  GroupActionKey inj_key = ga_gen(GaMode::inj, 7, rng);
  int ga_errors = 0;
  for (int m = 0; m < 2; ++m)
    for (std::uint32_t u = 0; u < 7; ++u) {
      auto got = ga_dec(inj_key, ga_enc(inj_key, m, u));
      if (!got || *got != m) ++ga_errors;
    }
  ok &= check(ga_errors == 0, "group-action decryption", ga_errors, 0);

  int ltf_errors = 0;
  for (int n = 2; n <= 8; ++n) {
    ToyLtfKey key = ltf_gen(LtfMode::inj, n, 1, rng);
    for (std::uint32_t x = 0; x < (1u << n); ++x)
      if (ltf_invert(key, ltf_eval(key, x)) != x) ++ltf_errors;
  }
  ok &= check(ltf_errors == 0, "ltf inversion", ltf_errors, 0);
  LossyPkeKey pke = pke_gen(LtfMode::lossy, 8, 4, 2, rng);
  auto audit = lossiness_audit(pke);
  double worst_tv = 0.0;
  for (std::size_t i = 0; i < audit.size(); ++i)
    for (std::size_t j = 0; j < audit.size(); ++j)
      if (i != j) worst_tv = std::max(worst_tv, audit[i][j]);
  double bound = crooked_lhl_bound(8, 2, 4);
  ok &= check(worst_tv <= bound, "pke lossy TV", worst_tv, bound);

  int miscount = 0;
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
          if (count != 1) ++miscount;
        }
  ok &= check(miscount == 0, "pairwise independence", miscount, 0);
  return ok;
}

// 7: the impossibility adversary on all three families.
bool criterion_7() {
  Rng rng(check_seed("acceptance", "impossibility", 0));
  bool ok = true;
  for (int n = 1; n <= 3; ++n) {
    FamilyMember member = family_constant(n, rng);
    double p1 = adversary_prob_of_1(fresh_program(member));
    ok &= check(p1 <= 1e-12, "constant prob_of_1", p1, 1e-12);
  }
  for (int n = 1; n <= 3; ++n) {
    FamilyMember member = family_injective(n, rng);
    double p0 = 1.0 - adversary_prob_of_1(fresh_program(member));
    ok &= check(p0 <= std::ldexp(1.0, -n) + 1e-10, "injective prob_of_0", p0,
                std::ldexp(1.0, -n) + 1e-10);
    double norm = projector_norm(member.f, member.support);
    ok &= check(std::abs(norm - std::ldexp(1.0, -n)) <= 1e-10,
                "projector norm", norm, std::ldexp(1.0, -n));
  }
  FamilyMember member = family_lossy(2, rng);
  SamplingProgram fresh = fresh_program(member);
  SamplingProgram mixed = mixture_program(member);
  double pair_tv = max_output_tv(fresh, mixed);
  ok &= check(pair_tv <= 1e-12, "one-time TV", pair_tv, 1e-12);
  double gap = adversary_prob_of_1(fresh) - adversary_prob_of_1(mixed);
  ok &= check(gap >= 0.5, "reuse gap", gap, 0.5);
  return ok;
}

// 8: the Marriott-Watrous distribution law, exact and empirical.
bool criterion_8() {
  RandomizedFunction f{1, 2, 1, {0, 0, 0, 1, 0, 0, 0, 1}};
  TestableProgram prog = canonical_program(f);
  Mat e = Mat::Zero(2, 2);
  e(1, 1) = 1.0;
  MwVerifier v = estimation_verifier(prog, 1, e);
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
  bool ok = check(worst <= 1e-9, "exact law deviation", worst, 1e-9);

  const int m0 = 2000, seeds = 200;
  const double alpha = 0.05;
  int violations = 0;
  Rng rng(check_seed("acceptance", "hoeffding", 0));
  for (int i = 0; i < seeds; ++i) {
    MwRun run = mw_rounds(v, prog.program_state, m0, rng);
    int s = 0;
    for (int b : run.bits) s += b;
    if (std::abs(double(s) / m0 - 0.25) > alpha) ++violations;
  }
  double q = 2.0 * std::exp(-2.0 * m0 * alpha * alpha);
  double bound = q + 3.0 * std::sqrt(q * (1 - q) / seeds);
  ok &= check(double(violations) / seeds <= bound, "hoeffding violations",
              double(violations) / seeds, bound);
  return ok;
}

// 9: the full multi-observable attack.
bool criterion_9() {
  RandomizedFunction f{1, 1, 1, {0, 0, 0, 1}};
  TestableProgram prog = canonical_program(f);
  Mat z = Mat::Zero(2, 2);
  z(0, 0) = 1.0;
  z(1, 1) = -1.0;
  std::vector<Mat> obs = {z, Mat::Identity(2, 2)};
  std::vector<std::uint64_t> inputs = {0, 1};
  int successes = 0, calls = 0, gentle = 0;
  for (int seed = 0; seed < 100; ++seed) {
    Rng rng(check_seed("acceptance", "attack", seed));
    AttackReport rep =
        multi_observable_attack(prog, inputs, obs, 0.2, 0.1, rng);
    if (!rep.success) continue;
    bool within = true;
    for (const auto& call : rep.calls) {
      ++calls;
      if (std::abs(call.estimate - call.truth) > 0.2) within = false;
      if (call.disturbance <= rep.params.tau) ++gentle;
    }
    if (within) ++successes;
  }
  bool ok = check(successes >= 90, "attack successes", successes, 90);
  ok &= check(double(gentle) / calls >= 0.95, "gentle fraction",
              double(gentle) / calls, 0.95);
  return ok;
}

// 10: stateful obfuscation correctness.
bool criterion_10() {
  Rng rng(check_seed("acceptance", "stateful", 0));
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    StatefulProgram prog = random_stateful(2, 2, rng);
    StatefulProgram obf = stateful_obfuscate(prog, 2, rng);
    std::vector<QueryScript> scripts;
    for (int s = 0; s < 20; ++s)
      scripts.push_back(random_stateful_script(1, 2, 2, 1 + int(rng() % 4),
                                               rng));
    worst = std::max(worst, functional_equiv(prog, obf, scripts));
  }
  bool ok = check(worst <= 1e-9, "honest equivalence", worst, 1e-9);

  StatefulProgram count = counting_program(2);
  StatefulProgram constant = constant_program(2, 1);
  QueryScript one{0, {{StepKind::forward, {}, {}}}};
  QueryScript two{
      0, {{StepKind::forward, {}, {}}, {StepKind::forward, {}, {}}}};
  double d1 = functional_equiv(count, constant, {one});
  double d2 = functional_equiv(count, constant, {two});
  ok &= check(d1 <= 1e-9, "one-query distance", d1, 0.0);
  ok &= check(std::abs(d2 - 1.0) <= 1e-9, "two-query distance", d2, 1.0);

  Vec psi = random_state(1, rng);
  double roundtrip = 0.0;
  for (std::uint64_t x = 0; x < 8; ++x)
    for (std::uint64_t zm = 0; zm < 8; ++zm) {
      QasKey key{1, 2, x, zm};
      Vec enc = qas_enc(key, psi);
      QasDecResult dec = qas_dec(key, enc, rng);
      if (!dec.accept)
        roundtrip = 1.0;
      else
        roundtrip = std::max(roundtrip, (dec.state - psi).norm());
    }
  ok &= check(roundtrip <= 1e-12, "qas roundtrip", roundtrip, 1e-12);

  int detected = 0;
  for (std::uint64_t ax = 0; ax < 8; ++ax)
    for (std::uint64_t az = 0; az < 8; ++az) {
      if (ax == 0 && az == 0) continue;
      bool all_keys_detect = true;
      for (std::uint64_t x = 0; x < 8; ++x)
        for (std::uint64_t zm = 0; zm < 8; ++zm) {
          QasKey key{1, 2, x, zm};
          QasKey attack{3, 0, ax, az};
          Vec hit = qas_mask_matrix(attack) * qas_enc(key, psi);
          if (qas_ver_prob(key, hit) > 1e-12) all_keys_detect = false;
        }
      if (all_keys_detect) ++detected;
    }
  ok &= check(detected == 48, "tamper detection count", detected, 48);
  return ok;
}

// 11: the statistical lemmas used everywhere else.
bool criterion_11() {
  Rng rng(check_seed("acceptance", "stats", 0));
  bool ok = true;
  double sandwich = 0.0, pure_formula = 0.0;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    Distribution p, q;
    double sp = 0.0, sq = 0.0;
    for (int k = 0; k < 8; ++k) {
      p.p[bits_to_string(k, 3)] = unif(rng);
      q.p[bits_to_string(k, 3)] = unif(rng);
      sp += p.p[bits_to_string(k, 3)];
      sq += q.p[bits_to_string(k, 3)];
    }
    for (int k = 0; k < 8; ++k) {
      p.p[bits_to_string(k, 3)] /= sp;
      q.p[bits_to_string(k, 3)] /= sq;
    }
    double h2 = hellinger_sq(p, q);
    double tv = tv_distance(p, q);
    if (h2 > tv + 1e-9) sandwich = std::max(sandwich, h2 - tv);
    double upper = std::sqrt(2.0 * h2);
    if (tv > upper + 1e-9) sandwich = std::max(sandwich, tv - upper);

    RegisterLayout layout({{"X", 3}});
    StateVector a = StateVector::zero(layout), b = StateVector::zero(layout);
    a.amps = random_state(3, rng);
    b.amps = random_state(3, rng);
    double td = trace_distance(partial_trace(a, {"X"}),
                               partial_trace(b, {"X"}));
    double formula = std::sqrt(
        std::max(0.0, 1.0 - std::norm(cxd(a.amps.dot(b.amps)))));
    pure_formula = std::max(pure_formula, std::abs(td - formula));
  }
  ok &= check(sandwich == 0.0, "hellinger sandwich slack", sandwich, 0.0);
  ok &= check(pure_formula <= 1e-9, "pure trace-distance formula",
              pure_formula, 1e-9);

  double l2_slack = 0.0;
  RegisterLayout layout({{"A", 2}, {"B", 2}});
  for (int i = 0; i < 200; ++i) {
    StateVector a = StateVector::zero(layout), b = StateVector::zero(layout);
    a.amps = random_state(4, rng);
    b.amps = random_state(4, rng);
    double td = trace_distance(partial_trace(a, {"A"}),
                               partial_trace(b, {"A"}));
    double l2 = (a.amps - b.amps).norm();
    if (td > l2 + 1e-9) l2_slack = std::max(l2_slack, td - l2);
  }
  ok &= check(l2_slack == 0.0, "l2-to-reduced-trace slack", l2_slack, 0.0);
  return ok;
}

// 12: byte-identical reports.
bool criterion_12() {
  bool ok = true;
  for (const char* suite :
       {"seq", "cseq", "lossy", "impossibility", "attack", "stateful"}) {
    ExperimentConfig config;
    config.suite = suite;
    config.seed = 7;
    std::string json1 = render_json(run_suite(config));
    config.jobs = 3;
    std::string json2 = render_json(run_suite(config));
    std::string csv1 = render_csv(run_suite(config));
    config.jobs = 1;
    std::string csv2 = render_csv(run_suite(config));
    bool same = (json1 == json2) && (csv1 == csv2);
    if (!same) std::printf("    suite %s reports differ\n", suite);
    ok &= same;
  }
  return ok;
}

using Criterion = bool (*)();
const std::vector<Criterion> kCriteria = {
    criterion_1, criterion_2, criterion_3, criterion_4,
    criterion_5, criterion_6, criterion_7, criterion_8,
    criterion_9, criterion_10, criterion_11, criterion_12,
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  if (argc > 1) only = std::atoi(argv[1]);
  if (only < 0 || only > int(kCriteria.size())) {
    std::fprintf(stderr, "usage: %s [1-12]\n", argv[0]);
    return 2;
  }
  bool all_ok = true;
  for (int i = 1; i <= int(kCriteria.size()); ++i) {
    if (only != 0 && i != only) continue;
    bool ok = false;
    try {
      ok = kCriteria[i - 1]();
    } catch (const std::exception& e) {
      std::printf("    criterion %d errored: %s\n", i, e.what());
    }
    std::printf("criterion %02d: %s\n", i, ok ? "PASS" : "FAIL");
    std::fflush(stdout);
    all_ok &= ok;
  }
  return all_ok ? 0 : 1;
}
