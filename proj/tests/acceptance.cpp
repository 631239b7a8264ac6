// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "qmf/interpret.hpp"
#include "qmf/selfcheck.hpp"
#include "qmf/trainer.hpp"

using namespace qmf;

namespace {

int failures = 0;

void report(int criterion, const std::string& name, bool pass,
            const std::string& detail, double seconds) {
  std::printf("%s — criterion %d (%s): %s [%.1fs]\n", pass ? "PASS" : "FAIL",
              criterion, name.c_str(), detail.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++failures;
}

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

std::string suite_summary(const std::vector<CheckResult>& rs) {
  std::string s;
  for (const auto& r : rs) {
    if (!s.empty()) s += "; ";
    s += r.name + (r.pass ? " ok" : " FAILED (" + r.detail + ")");
  }
  return s;
}

TrainInputs make_inputs(const SyntheticData& world) {
  TrainInputs in;
  in.data = &world.splits;
  in.vocab = world.vocab;
  in.lexicon = world.lexicon;
  in.schema = world.schema;
  in.embeddings =
      load_embeddings("", world.vocab, world.schema.embedding_dim, 12345);
  return in;
}

}  // namespace

int main() {
  // 1. Quantum-algebra property suite (1000 randomized trials, dims <= 4^3).
  {
    const double t0 = now_seconds();
    auto rs = check_quantum_algebra(1000);
    const double dt = now_seconds() - t0;
    report(1, "quantum algebra", all_pass(rs) && dt < 30.0, suite_summary(rs),
           dt);
  }

  // 2. Separability of sentence states and product kets.
  {
    const double t0 = now_seconds();
    auto rs = check_separability();
    const double dt = now_seconds() - t0;
    report(2, "separability", all_pass(rs) && dt < 10.0, suite_summary(rs),
           dt);
  }

  // 3. Finite-difference gradient check on 20 tiny full models.
  {
    const double t0 = now_seconds();
    auto rs = check_gradients(20);
    const double dt = now_seconds() - t0;
    report(3, "gradient check", all_pass(rs) && dt < 120.0, suite_summary(rs),
           dt);
  }

  // 4. Synthetic convergence: 500 samples, seed 7, default config,
  //    100 epochs; final train loss <= 50% of epoch 0, test acc2 >= 0.75.
  SyntheticData world = generate_synthetic(500, 7, {});
  TrainInputs in = make_inputs(world);
  RunConfig rc;  // defaults: dims 5/5/5, K=10, windows {1,2}, 100 epochs
  TrainResult trained;
  Metrics test_metrics;
  bool trained_ok = false;
  {
    const double t0 = now_seconds();
    std::string detail;
    bool pass = false;
    try {
      trained = train(in, rc);
      trained_ok = true;
      test_metrics = evaluate(trained.model, world.splits.test);
      const double first = trained.log.front().train_loss;
      const double final_loss = trained.log.back().train_loss;
      pass = final_loss <= 0.5 * first && test_metrics.acc2 >= 0.75;
      char buf[160];
      std::snprintf(buf, sizeof(buf),
                    "train loss %.4f -> %.4f (need <= %.4f), test acc2 %.3f "
                    "(need >= 0.75)",
                    first, final_loss, 0.5 * first, test_metrics.acc2);
      detail = buf;
    } catch (const std::exception& e) {
      detail = std::string("training failed: ") + e.what();
    }
    const double dt = now_seconds() - t0;
    report(4, "synthetic convergence", pass && dt < 600.0, detail, dt);
  }

  // 5. Interpretation consistency: full-subset predictions reproduce the
  //    forward pass within 1e-9; textual-only beats visual/acoustic-only.
  {
    const double t0 = now_seconds();
    std::string detail;
    bool pass = false;
    if (trained_ok) {
      double max_gap = 0.0;
      for (const auto& s : world.splits.test) {
        const double direct = predict_sentence(trained.model, s);
        const double subset =
            predict_subset(trained.model, s, kAllModalities);
        max_gap = std::max(max_gap, std::abs(direct - subset));
      }
      auto subset_acc2 = [&](Modality m) {
        const auto& split = world.splits.test;
        Eigen::VectorXd preds(split.size()), labels(split.size());
        for (size_t i = 0; i < split.size(); ++i) {
          preds[i] = predict_subset(trained.model, split[i], {m});
          labels[i] = split[i].label;
        }
        return compute_metrics(preds, labels).acc2;
      };
      const double acc_t = subset_acc2(Modality::textual);
      const double acc_v = subset_acc2(Modality::visual);
      const double acc_a = subset_acc2(Modality::acoustic);
      pass = max_gap < 1e-9 && acc_t > acc_v && acc_t > acc_a;
      char buf[160];
      std::snprintf(buf, sizeof(buf),
                    "max |forward - subset(tva)| = %.2e; acc2 t/v/a = "
                    "%.3f/%.3f/%.3f",
                    max_gap, acc_t, acc_v, acc_a);
      detail = buf;
    } else {
      detail = "skipped: criterion 4 training failed";
    }
    const double dt = now_seconds() - t0;
    report(5, "interpretation consistency", pass && dt < 120.0, detail, dt);
  }

  // 6. Ablation harness: all four variants train and report metrics; the
  //    real variant's word states carry no imaginary parts.
  {
    const double t0 = now_seconds();
    std::string detail;
    bool pass = true;
    RunConfig arc = rc;
    arc.epochs = 25;
    for (Variant v : {Variant::real, Variant::rand_init,
                      Variant::global_mixture, Variant::average_pool}) {
      try {
        VariantResult r = run_variant(v, in, arc);
        if (!std::isfinite(r.test_metrics.mae) ||
            !std::isfinite(r.test_metrics.acc2)) {
          pass = false;
          detail += to_string(v) + ": non-finite metrics; ";
          continue;
        }
        if (v == Variant::real) {
          // structural reality: every argument table is frozen at zero, so
          // the forward graph's imaginary planes are exactly zero (checked
          // on the tape itself; polar Ket reconstruction would reintroduce
          // sin(pi) rounding when folding negative moduli)
          double max_arg = 0.0;
          for (const ad::Parameter* p :
               {&r.run.model.theta_t, &r.run.model.theta_v,
                &r.run.model.theta_a, &r.run.model.obs_args})
            for (double x : p->value) max_arg = std::max(max_arg, std::abs(x));
          double max_imag = 0.0;
          ad::Tape t;
          ForwardResult fr =
              build_forward(t, r.run.model, world.splits.test.front());
          for (const CVec& w : fr.word_states)
            for (double x : t.val(w.im))
              max_imag = std::max(max_imag, std::abs(x));
          if (max_arg != 0.0 || max_imag != 0.0) {
            pass = false;
            detail += "real variant has nonzero imaginary structure; ";
          }
        }
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%s acc2 %.3f mae %.3f; ",
                      to_string(v).c_str(), r.test_metrics.acc2,
                      r.test_metrics.mae);
        detail += buf;
      } catch (const std::exception& e) {
        pass = false;
        detail += to_string(v) + " failed: " + e.what() + "; ";
      }
    }
    const double dt = now_seconds() - t0;
    report(6, "ablation harness", pass && dt < 1800.0, detail, dt);
  }

  // 7. Determinism: identical seed-42 runs produce identical logs
  //    (timestamps excluded by construction).
  {
    const double t0 = now_seconds();
    RunConfig drc = rc;
    drc.epochs = 5;
    drc.seed = 42;
    TrainResult r1 = train(in, drc);
    TrainResult r2 = train(in, drc);
    const std::string l1 = run_log_string(
        r1, evaluate(r1.model, world.splits.test), drc, false);
    const std::string l2 = run_log_string(
        r2, evaluate(r2.model, world.splits.test), drc, false);
    const bool pass = l1 == l2 && !l1.empty();
    const double dt = now_seconds() - t0;
    report(7, "determinism", pass,
           pass ? "two seed-42 runs, identical logs"
                : "run logs differ between identical runs",
           dt);
  }

  if (failures == 0) {
    std::printf("acceptance: all 7 criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criterion(s) FAILED\n", failures);
  return 1;
}
