#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "debranges.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace debranges;

namespace {

constexpr int exit_config = 2;
constexpr int exit_numerical = 3;

// Values from --config override the corresponding flags.
template <class T>
void override_from(const json& cfg, const char* key, T& target) {
  if (!cfg.contains(key)) return;
  try {
    target = cfg.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

struct SpectrumConfig {
  std::string q = "zero";
  long n = 30;
  double tol = 1e-11;

  void apply(const json& c) {
    override_from(c, "q", q);
    override_from(c, "n", n);
    override_from(c, "tol", tol);
  }
  json to_json() const { return {{"command", "spectrum"}, {"q", q}, {"n", n}, {"tol", tol}}; }
};

struct CharacterizeConfig {
  std::string source = "q:zero";
  std::string reference;
  std::string mode = "trig";
  long M = 2000;
  double tail_fraction = 0.1;
  double tol = 1e-11;

  void apply(const json& c) {
    override_from(c, "source", source);
    override_from(c, "reference", reference);
    override_from(c, "mode", mode);
    override_from(c, "M", M);
    override_from(c, "tail_fraction", tail_fraction);
    override_from(c, "tol", tol);
  }
  json to_json() const {
    return {{"command", "characterize"}, {"source", source}, {"reference", reference}, {"mode", mode},
            {"M", M},                    {"tail_fraction", tail_fraction}, {"tol", tol}};
  }
};

struct ConstructConfig {
  std::string f = "zero";
  double amp = 0.05;
  long M = 2000;
  long zeros = 100;
  double threshold = 0.1;

  void apply(const json& c) {
    override_from(c, "f", f);
    override_from(c, "amp", amp);
    override_from(c, "M", M);
    override_from(c, "zeros", zeros);
    override_from(c, "threshold", threshold);
  }
  json to_json() const {
    return {{"command", "construct"}, {"f", f}, {"amp", amp}, {"M", M}, {"zeros", zeros}, {"threshold", threshold}};
  }
};

struct ResonancesConfig {
  std::string source = "q:zero";
  double xmax = 60.0;
  double ymin = -8.0;
  double margin = 0.5;
  double certify_xmax = 0.0;  // 0 means xmax
  bool certify = true;
  double tol = 1e-11;

  void apply(const json& c) {
    override_from(c, "source", source);
    override_from(c, "xmax", xmax);
    override_from(c, "ymin", ymin);
    override_from(c, "margin", margin);
    override_from(c, "certify_xmax", certify_xmax);
    override_from(c, "certify", certify);
    override_from(c, "tol", tol);
  }
  json to_json() const {
    return {{"command", "resonances"}, {"source", source}, {"xmax", xmax},       {"ymin", ymin}, {"margin", margin},
            {"certify_xmax", certify_xmax > 0 ? certify_xmax : xmax},           {"certify", certify}, {"tol", tol}};
  }
};

void write_script(const fs::path& out, const std::string& name, const std::string& body) {
  io::write_text(out / (name + ".gp"), "set terminal pngcairo size 900,600\nset output '" + name + ".png'\n" +
                                           "set datafile separator ','\nset key autotitle columnhead\n" + body);
}

int run_spectrum(const SpectrumConfig& cfg, const fs::path& out) {
  if (cfg.n < 5) throw ConfigError("--n must be at least 5");
  const Source src = source_from_potential("q:" + cfg.q, Potential::from_spec(cfg.q), cfg.tol);
  const auto spectra = compute_spectra(*src.shooter, static_cast<std::size_t>(cfg.n));
  const auto fit = asymptotic_fit(spectra);
  io::CsvWriter csv({"n", "lambda_sq", "mu_sq", "a_n", "b_n"});
  for (std::size_t i = 0; i < spectra.N; ++i)
    csv.row({double(i + 1), spectra.dd[i], spectra.nd[i], fit.residuals_a[i], fit.residuals_b[i]});
  csv.save(out / "spectrum.csv");
  io::write_json(out / "fit.json", {{"config", cfg.to_json()},
                                    {"source", src.to_json()},
                                    {"shift", spectra.shift},
                                    {"fit", to_json(fit)},
                                    {"tail_share_a", fit.tail_share_a(3 * spectra.N / 4 + 1)},
                                    {"tail_share_b", fit.tail_share_b(3 * spectra.N / 4 + 1)}});
  write_script(out, "spectrum", "set xlabel 'n'\nplot 'spectrum.csv' using 1:4 with linespoints, '' using 1:5 with linespoints\n");
  return 0;
}

int run_characterize(const CharacterizeConfig& cfg, const fs::path& out) {
  if (cfg.mode != "trig" && cfg.mode != "pair") throw ConfigError("--mode must be 'trig' or 'pair'");
  if (cfg.mode == "pair" && cfg.reference.empty()) throw ConfigError("pair mode needs --reference");
  const Source src = resolve_source(cfg.source, cfg.tol);
  CheckOptions opt;
  opt.membership.M = cfg.M;
  opt.membership.tail_fraction = cfg.tail_fraction;
  json j{{"config", cfg.to_json()}, {"source", src.to_json()}};
  Verdict v;
  if (cfg.mode == "pair") {
    const Source ref = resolve_source(cfg.reference, cfg.tol);
    j["reference"] = ref.to_json();
    v = check_pair(src.evaluator, ref.evaluator, opt);
  } else {
    v = check_schrodinger_L2(src.evaluator, opt);
  }
  j["result"] = v.to_json();
  io::write_json(out / "membership.json", j);
  io::CsvWriter samples({"m", "x", "F", "F_minus_C_hat"});
  const long M = v.report.M;
  for (long m = -M; m <= M; ++m) {
    const double F = v.report.samples[std::size_t(m + M)];
    samples.row({double(m), v.report.offset + double(m) * v.report.step, F, F - v.C_hat});
  }
  samples.save(out / "lattice_samples.csv");
  io::CsvWriter plot({"x", "F_minus_C_hat"});
  for (long m = -M; m <= M; ++m)
    plot.row({v.report.offset + double(m) * v.report.step, v.report.samples[std::size_t(m + M)] - v.C_hat});
  plot.save(out / "plot_data.csv");
  write_script(out, "characterize", "set xlabel 'x'\nplot 'plot_data.csv' using 1:2 with lines\n");
  return 0;
}

int run_construct(const ConstructConfig& cfg, const fs::path& out) {
  const auto f = EvenPWFunction::from_name(cfg.f, cfg.amp);
  ConstructOptions opt;
  opt.M = cfg.M;
  opt.zero_count = cfg.zeros;
  opt.norm_threshold = cfg.threshold;
  const auto db = construct_from_f(f, opt);
  io::write_json(out / "construct.json", {{"config", cfg.to_json()}, {"result", db.to_json()}});
  io::CsvWriter zs({"n", "lambda", "mu", "lambda_minus_pi_n", "mu_minus_pi_n_half"});
  for (std::size_t i = 0; i < db.lambda.size(); ++i) {
    const double n = double(i + 1);
    zs.row({n, db.lambda[i], db.mu[i], db.lambda[i] - pi * n, db.mu[i] - pi * (n - 0.5)});
  }
  zs.save(out / "zeros.csv");
  io::CsvWriter rt({"x", "pairing", "f_minus_f0", "error"});
  for (long i = 0; i < opt.compare_points; ++i) {
    const double x = -opt.compare_range + 2.0 * opt.compare_range * double(i) / double(opt.compare_points - 1);
    const auto ab = (*db.evaluator)(x);
    const double p = x == 0.0 ? 0.0 : (x * (ab.A * std::cos(x) - ab.B * std::sin(x))).real();
    const double target = f(x) - db.f0;
    rt.row({x, p, target, p - target});
  }
  rt.save(out / "roundtrip.csv");
  write_script(out, "construct", "set xlabel 'n'\nplot 'zeros.csv' using 1:4 with linespoints, '' using 1:5 with linespoints\n");
  return 0;
}

long cell_count_of(const ResonanceSet& set, cplx z) {
  for (const auto& c : set.cells)
    if (c.count > 0 && c.rect.contains(z)) return c.count;
  return 0;
}

int run_resonances(const ResonancesConfig& cfg, const fs::path& out) {
  const Source src = resolve_source(cfg.source, cfg.tol);
  const auto set = find_resonances(src.evaluator, {cfg.xmax, cfg.ymin, 0.0});
  json j{{"config", cfg.to_json()}, {"source", src.to_json()}, {"resonances", set.to_json()}};
  const double C = (set.strip_C ? *set.strip_C : 0.0) + cfg.margin;
  if (cfg.certify) {
    const auto cert = certify_strip(src.evaluator, C, cfg.certify_xmax > 0 ? cfg.certify_xmax : cfg.xmax);
    j["certification"] = cert.to_json();
  }
  io::write_json(out / "resonances.json", j);
  io::CsvWriter csv({"x", "y", "residual", "cell_count"});
  for (const auto& r : set.zeros) csv.row({r.z.real(), r.z.imag(), r.residual, double(cell_count_of(set, r.z))});
  csv.save(out / "resonances.csv");
  io::CsvWriter curve({"x", "y"});
  const long n = 401;
  for (long i = 0; i < n; ++i) {
    const double x = -cfg.xmax + 2.0 * cfg.xmax * double(i) / double(n - 1);
    curve.row({x, strip_curve(x, C)});
  }
  curve.save(out / "strip_curve.csv");
  write_script(out, "resonances",
               "set xlabel 'Re z'\nset ylabel 'Im z'\n"
               "plot 'resonances.csv' using 1:2 with points pt 7, 'strip_curve.csv' using 1:2 with lines\n");
  return 0;
}

void write_error(const fs::path& out, const std::string& kind, const std::string& message, const json& config) {
  try {
    io::write_json(out / "error.json", {{"error", kind}, {"message", message}, {"config", config}});
  } catch (const std::exception&) {
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"de Branges / Schrödinger toolkit"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir = "out";
  app.add_option("--config", config_path, "JSON config; its keys override flags");
  app.add_option("--out", out_dir, "output directory");

  SpectrumConfig sp;
  auto* c_sp = app.add_subcommand("spectrum", "DD and ND spectra with the asymptotic fit");
  c_sp->add_option("--q", sp.q, "potential: zero, const:c, cos:a,k, linear:a,b");
  c_sp->add_option("--n", sp.n, "number of eigenvalues");
  c_sp->add_option("--tol", sp.tol, "shooting tolerance");

  CharacterizeConfig ch;
  auto* c_ch = app.add_subcommand("characterize", "Const + L2 membership of the pairing function");
  c_ch->add_option("--source", ch.source, "q:<potential>, qfile:<path>, fixture:<name> or zeros:<path>");
  c_ch->add_option("--reference", ch.reference, "reference source for pair mode");
  c_ch->add_option("--mode", ch.mode, "trig or pair");
  c_ch->add_option("--M", ch.M, "lattice half-width");
  c_ch->add_option("--tail-fraction", ch.tail_fraction, "allowed last-quarter share");
  c_ch->add_option("--tol", ch.tol, "shooting tolerance");

  ConstructConfig co;
  auto* c_co = app.add_subcommand("construct", "build (A, B) from an even PW2 function");
  c_co->add_option("--f", co.f, "zero, sinc, sinc2 or sinc4");
  c_co->add_option("--amp", co.amp, "amplitude");
  c_co->add_option("--M", co.M, "sampling half-width");
  c_co->add_option("--zeros", co.zeros, "zeros per sequence");
  c_co->add_option("--threshold", co.threshold, "smallness threshold on the lattice norm of f");

  ResonancesConfig re;
  auto* c_re = app.add_subcommand("resonances", "zeros of E in the lower half-plane and the strip certificate");
  c_re->add_option("--source", re.source, "q:<potential>, qfile:<path>, fixture:<name> or zeros:<path>");
  c_re->add_option("--xmax", re.xmax, "search half-width");
  c_re->add_option("--ymin", re.ymin, "search depth");
  c_re->add_option("--margin", re.margin, "added to strip_C for certification");
  c_re->add_option("--certify-xmax", re.certify_xmax, "certification half-width (default xmax)");
  c_re->add_flag("!--no-certify", re.certify, "skip strip certification");
  c_re->add_option("--tol", re.tol, "shooting tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_config;
  }

  json resolved;
  try {
    json cfg = json::object();
    if (!config_path.empty()) cfg = read_json_file(config_path);
    if (!cfg.is_object()) throw ConfigError("config must be a JSON object");
    if (cfg.contains("out")) out_dir = cfg.at("out").get<std::string>();
    const fs::path target = out_dir;
    if (*c_sp) {
      sp.apply(cfg);
      resolved = sp.to_json();
      return run_spectrum(sp, target);
    }
    if (*c_ch) {
      ch.apply(cfg);
      resolved = ch.to_json();
      return run_characterize(ch, target);
    }
    if (*c_co) {
      co.apply(cfg);
      resolved = co.to_json();
      return run_construct(co, target);
    }
    re.apply(cfg);
    resolved = re.to_json();
    return run_resonances(re, target);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    write_error(out_dir, "config", e.what(), resolved);
    return exit_config;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    write_error(out_dir, "config", e.what(), resolved);
    return exit_config;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    write_error(out_dir, "numerical", e.what(), resolved);
    return exit_numerical;
  }
}
