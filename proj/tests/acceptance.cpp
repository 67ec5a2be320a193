// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Runs the full budgets, so it takes a minute or two.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "json.hpp"
#include "sqc/certify.hpp"
#include "sqc/convexity.hpp"
#include "sqc/tartar.hpp"
#include "sqc/torus.hpp"

using sqc::Mat;

namespace {

// Golden k for criterion 6 (eps = 0.005, seed 0, 1e5 x 32).
constexpr double kGoldenK = 31000.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome moments_check() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto mom = sqc::moments(sqc::build_B3(), sqc::build_base_4x3(), 16);
  const double t = elapsed(t0);
  const bool ok = std::abs(mom.i0 + 0.25) <= 1e-10 && std::abs(mom.i2 - 4.0) <= 1e-10 &&
                  std::abs(mom.i4 - 19.0) <= 1e-10 && t < 1.0;
  return {ok, fmt("I0=%.17g I2=%.17g I4=%.17g (tol 1e-10), %.3fs (< 1s)", mom.i0, mom.i2, mom.i4, t)};
}

Outcome structure_check() {
  const auto basis = sqc::build_base_4x3();
  const auto b = sqc::build_B3();
  const bool zero_mean = sqc::mean(b).isZero(0.0);
  const bool div_free = sqc::check_div_free(b);
  std::mt19937_64 rng(0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const std::vector<double> x{unit(rng), unit(rng), unit(rng)};
    const Mat v = b.evaluate(x);
    worst = std::max(worst, (v - sqc::project(basis, v)).norm());
  }
  return {zero_mean && div_free && worst <= 1e-12,
          fmt("mean==0 %s, div_free %s, max |B-PB| = %.3g (tol 1e-12)", zero_mean ? "yes" : "no",
              div_free ? "yes" : "no", worst)};
}

Outcome defect_check() {
  const auto basis = sqc::build_base_4x3();
  const auto b = sqc::build_B3();
  const double d0 = sqc::sq_defect(basis, {0.005, 0.0}, b).defect;
  double spread = 0.0;
  for (double k : {1.0, 1e3}) spread = std::max(spread, std::abs(sqc::sq_defect(basis, {0.005, k}, b).defect - d0));
  return {std::abs(d0 + 0.135) <= 1e-9 && spread <= 1e-12,
          fmt("defect=%.17g (expect -0.135 +- 1e-9), k-spread %.3g (tol 1e-12)", d0, spread)};
}

Outcome epsilon_check() {
  const auto basis = sqc::build_base_4x3();
  const auto b = sqc::build_B3();
  const auto mom = sqc::moments(b, basis, 16);
  const double eps = sqc::choose_epsilon(mom, 0.5);
  const double margin = -(mom.i0 + eps * (mom.i2 + mom.i4));
  return {std::abs(eps - 0.25 / 46.0) <= 1e-9 && std::abs(margin - 0.125) <= 1e-9,
          fmt("eps=%.17g (0.25/46 +- 1e-9), margin=%.17g (0.125 +- 1e-9)", eps, margin)};
}

Outcome spectrum_check() {
  bool ok = true;
  std::string detail;
  for (int n = 3; n <= 6; ++n) {
    const auto basis = sqc::build_base_n(n, n + 1);
    const auto t0 = std::chrono::steady_clock::now();
    const auto s1 = sqc::scan_axis_spectrum(basis, 4096, 0.1);
    const double t = elapsed(t0);
    const auto s2 = sqc::scan_axis_spectrum(basis, 8192, 0.1);
    const double rel = std::abs(s2.min_sigma_n - s1.min_sigma_n) / s1.min_sigma_n;
    const double axis = std::max({s1.axis_sigmas[0], s1.axis_sigmas[1], s1.axis_sigmas[2]});
    ok = ok && s1.min_sigma_n > 0.0 && rel <= 0.05 && axis <= 1e-12 && t < 30.0;
    detail += fmt("n=%d min=%.4g drift=%.2g%% axis=%.2g %.1fs; ", n, s1.min_sigma_n, 100.0 * rel, axis, t);
  }
  const auto b4 = sqc::build_base_n(4, 5);
  const double tol = sqc::default_rank_tol(5, 4);
  const int r1 = sqc::numeric_rank(b4.v1(), tol), r2 = sqc::numeric_rank(b4.v2(), tol),
            r3 = sqc::numeric_rank(b4.v3(), tol);
  ok = ok && r1 == 3 && r2 == 2 && r3 == 3;
  detail += fmt("n=4 ranks (%d,%d,%d)", r1, r2, r3);
  return {ok, detail};
}

Outcome convexity_certificate() {
  const auto basis = sqc::build_base_4x3();
  const auto t0 = std::chrono::steady_clock::now();
  const auto res = sqc::find_k(basis, 0.005, 1e-8, {100000, 32, 0});
  if (!res.success || !std::isfinite(res.k)) {
    return {false, fmt("find_k inconclusive after %d probes (min defect %.3g)", res.probes, res.min_defect)};
  }
  const auto again = sqc::min_hess_defect(basis, {0.005, res.k}, res.search_radius, 100000, 32, 1);
  return {again.value >= -1e-8 && res.k == kGoldenK,
          fmt("k=%g (golden %g), seed0 min=%.3g, seed1 min=%.3g (>= -1e-8), %.1fs", res.k, kGoldenK,
              res.min_defect, again.value, elapsed(t0))};
}

Outcome derivative_check() {
  double worst = 0.0;
  for (int n : {3, 4}) {
    const auto b = sqc::build_base_n(n, n + 1);
    const sqc::ExtensionParams p{0.005, 250.0};
    std::mt19937_64 rng(7 + n);
    std::normal_distribution<double> normal(0.0, 1.0);
    auto gaussian = [&] {
      Mat x(n + 1, n);
      for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
      return x;
    };
    const auto F = [&](const Mat& x) { return sqc::F_ext(b, p, x); };
    // Five-point stencil: no truncation error on a quartic, so h only trades
    // against rounding in F (about 1e3 at this k).
    const double h = 1e-2;
    for (int t = 0; t < 1000; ++t) {
      const Mat a = gaussian();
      const Mat y = gaussian().normalized();
      const double exact = sqc::hess_form_F(b, p, a, y);
      const double fd =
          (16.0 * (F(a + h * y) + F(a - h * y)) - F(a + 2.0 * h * y) - F(a - 2.0 * h * y) - 30.0 * F(a)) /
          (12.0 * h * h);
      worst = std::max(worst, std::abs(fd - exact) / std::max(1.0, std::abs(exact)));
    }
  }
  return {worst <= 1e-6, fmt("max relative error %.3g over 2000 pairs (tol 1e-6)", worst)};
}

Outcome linearity_check() {
  double worst = 0.0;
  for (int n : {3, 4, 5}) {
    const auto basis = sqc::build_base_n(n, n + 1);
    const sqc::ScalarFn g = [&](const Mat& x) { return sqc::f_L(sqc::coords(basis, x)); };
    const auto grid = sqc::uniform_grid(-2.0, 2.0, 41);
    std::mt19937_64 rng(n);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int i = 0; i < 3; ++i) {
      for (int t = 0; t < 10; ++t) {
        Mat a(n + 1, n);
        for (Eigen::Index j = 0; j < a.size(); ++j) a.data()[j] = normal(rng);
        worst = std::max(worst, std::abs(sqc::line_convexity_defect(g, a, basis.v(i), grid)));
      }
    }
  }
  return {worst <= 1e-12, fmt("max |second difference| along V1,V2,V3 = %.3g (tol 1e-12)", worst)};
}

Outcome tartar_suite() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto s = sqc::tartar_check(4, 3, 100, 20, 100000, 0);
  const double t = elapsed(t0);
  return {s.violations == 0 && s.convex_control_violations == 0 && s.accepted > 0 && t < 60.0,
          fmt("%d/%d forms accepted (%d nonconvex), %d violations, controls min %.3g, %.1fs (< 60s)", s.accepted,
              s.forms, s.accepted_nonconvex, s.violations, s.min_convex_control_defect, t)};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome end_to_end() {
  bool ok = true;
  std::string detail;
  const auto dir = std::filesystem::temp_directory_path() / "sqc_acceptance";
  std::filesystem::create_directories(dir);
  for (auto [n, m] : {std::pair{3, 4}, std::pair{4, 5}}) {
    std::string reports[2];
    int codes[2];
    const auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < 2; ++r) {
      const auto out = dir / fmt("cert_n%d_%d.json", n, r);
      const std::string cmd = fmt("%s certify --n %d --m %d --seed 0 --out %s", SQC_CLI_PATH, n, m, out.c_str());
      const int status = std::system(cmd.c_str());
      codes[r] = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
      reports[r] = slurp(out);
    }
    std::string verdict = "?";
    try {
      verdict = nlohmann::json::parse(reports[0])["verdict"].get<std::string>();
    } catch (const std::exception&) {
    }
    const bool same = reports[0] == reports[1] && !reports[0].empty();
    ok = ok && codes[0] == 0 && codes[1] == 0 && verdict == "counterexample-certified" && same;
    detail += fmt("n=%d: exit %d/%d, %s, %s, %.1fs; ", n, codes[0], codes[1], verdict.c_str(),
                  same ? "byte-identical" : "reports differ", elapsed(t0));
  }
  return {ok, detail};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"moment values", moments_check},
      {"structural checks", structure_check},
      {"counterexample defect", defect_check},
      {"epsilon selection", epsilon_check},
      {"rank spectrum", spectrum_check},
      {"rank-(n-1) convexity certificate", convexity_certificate},
      {"derivative oracle", derivative_check},
      {"linearity on generators", linearity_check},
      {"quadratic-form suite", tartar_suite},
      {"end-to-end certify", end_to_end},
  };
  int failures = 0;
  int id = 1;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] criterion %d: %s: %s\n", o.pass ? "PASS" : "FAIL", id++, name, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  std::printf("%d/%d criteria passed\n", 10 - failures, 10);
  return failures == 0 ? 0 : 1;
}
