// Acceptance suite: one PASS/FAIL line per criterion.
//
// Each criterion runs its built-in demo, and most add an independent check
// computed here from dense grids (plain matrix products and quadrature).

#include <chrono>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "grpd/grpd.hpp"

namespace {

namespace fs = std::filesystem;
using grpd::cd;

struct Outcome {
  bool pass = true;
  std::string note;
  void need(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      note += (note.empty() ? "" : "; ") + what;
    }
  }
};

const fs::path kOut = fs::temp_directory_path() / "grpd_acceptance";

Outcome demo_outcome(const std::string& name, double budget_s) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = grpd::run_demo(name, 0, kOut / name);
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  for (const auto& c : r.checks)
    if (!c.pass) o.need(false, c.name + " = " + std::to_string(c.value));
  if (budget_s > 0) o.need(s < budget_s, "runtime " + std::to_string(s) + " s");
  return o;
}

// Dense oracle: (u*v)(x,z) = (1/n) sum_y U(x,y) V(y,z) on PAIR_CIRCLE grids.
std::vector<cd> dense_product(int n, const std::vector<cd>& a, const std::vector<cd>& b) {
  std::vector<cd> c(static_cast<std::size_t>(n) * n);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      const cd axy = a[x * n + y];
      if (axy == cd{}) continue;
      for (int z = 0; z < n; ++z) c[x * n + z] += axy * b[y * n + z];
    }
  for (auto& v : c) v /= double(n);
  return c;
}

double rel_diff(const std::vector<cd>& a, const std::vector<cd>& b) {
  double d = 0.0, s = 1.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d = std::max(d, std::abs(a[i] - b[i]));
    s = std::max(s, std::abs(a[i]));
  }
  return d / s;
}

Outcome criterion1() { return demo_outcome("groupoid-axioms", 10.0); }

Outcome criterion2() {
  Outcome o = demo_outcome("kernel-identities", 0.0);
  // Pointwise on every PAIR_CIRCLE n=64 base: (x,y,xi,0) in ker s, (x,y,0,eta) in ker r.
  const auto m = grpd::make_model(grpd::ModelKind::kPairCircle, 64);
  bool ok = true;
  for (int x = 0; x < 64; ++x)
    for (int y = 0; y < 64; ++y) {
      const auto g = grpd::element_from_indices(m, {x, y});
      ok = ok && grpd::in_kernel(grpd::make_cotangent(g, {1.5, 0.0}), grpd::KernelKind::kKerS) &&
           !grpd::in_kernel(grpd::make_cotangent(g, {1.5, 0.0}), grpd::KernelKind::kKerR) &&
           grpd::in_kernel(grpd::make_cotangent(g, {0.0, -2.0}), grpd::KernelKind::kKerR) &&
           !grpd::in_kernel(grpd::make_cotangent(g, {0.0, -2.0}), grpd::KernelKind::kKerS);
    }
  o.need(ok, "grid kernel oracle");
  return o;
}

Outcome criterion3() {
  Outcome o = demo_outcome("unit-laws", 30.0);
  const auto m = grpd::make_model(grpd::ModelKind::kPairCircle, 64);
  const auto cat = grpd::demo_detail::algebra_catalog(m, 0);
  double worst = 0.0;
  for (const auto& u : cat)
    for (const auto& v : cat)
      worst = std::max(worst, rel_diff(grpd::to_dense(grpd::convolve(u, v)),
                                       dense_product(m.n, grpd::to_dense(u), grpd::to_dense(v))));
  o.need(worst < 1e-9, "dense product oracle " + std::to_string(worst));
  return o;
}

Outcome criterion4() {
  Outcome o = demo_outcome("g-operators", 0.0);
  // Kernel recovery against a hand-built layer: P f(x) = 2 f(x - 5).
  const auto m = grpd::make_model(grpd::ModelKind::kPairCircle, 64);
  const auto k = grpd::make_layer(m, 5, {cd{2.0, 0.0}}, 0, "");
  const auto back = grpd::recover_kernel(grpd::make_goperator(k));
  o.need(rel_diff(grpd::to_dense(back), grpd::to_dense(k)) < 1e-9, "recover_kernel oracle");
  return o;
}

Outcome criterion5() { return demo_outcome("transformation-groupoid", 0.0); }
Outcome criterion6() { return demo_outcome("remark-counterexample", 20.0); }
Outcome criterion7() { return demo_outcome("wf-product-layers", 60.0); }
Outcome criterion8() { return demo_outcome("cone-heredity", 0.0); }

Outcome criterion9() {
  Outcome o = demo_outcome("determinism-serialization", 0.0);
  // Built-in scenarios twice with the same seed.
  const fs::path dir = GRPD_SCENARIO_DIR;
  int count = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() != ".json") continue;
    ++count;
    const auto spec = nlohmann::json::parse(grpd::read_file(e.path()));
    const auto seed = spec.value("seed", std::uint64_t{0});
    const auto stem = e.path().stem().string();
    const fs::path a = kOut / "scenarios_a" / stem, b = kOut / "scenarios_b" / stem;
    fs::remove_all(a);
    fs::remove_all(b);
    grpd::run_scenario(spec, seed, a);
    grpd::run_scenario(spec, seed, b);
    o.need(grpd::demo_detail::snapshot(a) == grpd::demo_detail::snapshot(b), stem + " differs between runs");
  }
  o.need(count > 0, "no scenarios found in " + dir.string());
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 groupoid and cotangent groupoid axioms", criterion1},
      {"2 kernel identities and Lagrangian graph", criterion2},
      {"3 convolution algebra laws", criterion3},
      {"4 G-operator correspondence", criterion4},
      {"5 transformation groupoid isomorphism", criterion5},
      {"6 counterexample reproduction", criterion6},
      {"7 microlocal product bound", criterion7},
      {"8 cone algebra heredity", criterion8},
      {"9 determinism and serialization", criterion9},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.need(false, std::string("exception: ") + e.what());
    }
    failed += !o.pass;
    std::printf("[%s] %s%s%s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.note.empty() ? "" : " : ",
                o.note.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
