#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "mcur/mcur.hpp"
#include "mcur/metrics.hpp"
#include "mcur/separation.hpp"
#include "mcur/video_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mcur;

namespace {

struct TransformFlags {
  std::string family = "dct";
  std::string regime = "inv";
  Index q = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--transform", family, "transform family")
        ->check(CLI::IsMember({"dct", "dst", "dft", "identity", "u3"}));
    cmd->add_option("--regime", regime, "map regime")
        ->check(CLI::IsMember({"inv", "surj", "inj"}));
    cmd->add_option("--q", q, "target tube length (required for surj/inj)");
  }

  TransformSpec spec(Index p) const {
    TransformSpec s;
    s.family = parse_family(family);
    s.regime = parse_regime(regime);
    s.p = p;
    s.q = (s.regime == Regime::invertible) ? p : q;
    if (s.regime != Regime::invertible && q == 0)
      throw CLI::ValidationError("--q is required for surj/inj regimes");
    s.validate();
    return s;
  }
};

json spec_to_json(const TransformSpec& s) {
  return json{{"family", to_string(s.family)},
              {"regime", to_string(s.regime)},
              {"p", s.p},
              {"q", s.q}};
}

json indices_to_json(const IndexSet& s) { return json(s.indices()); }

void write_json(const fs::path& file, const json& j) {
  std::ofstream os(file);
  if (!os) throw std::runtime_error("cannot write: " + file.string());
  os << j.dump(2) << "\n";
}

// CLI human output shows 1-based indices; JSON stays 0-based.
std::string one_based(const json& idx) {
  std::string out = "{";
  bool first = true;
  for (const auto& v : idx) {
    if (!first) out += ",";
    first = false;
    out += std::to_string(v.get<long long>() + 1);
  }
  return out + "}";
}

int run_synth(const fs::path& out, Index m, Index n, Index frames,
              Index square, const std::string& motion, std::uint64_t seed,
              bool json_out) {
  SynthVideo v = synth_video(m, n, frames, square,
                             motion == "none" ? Motion::none : Motion::linear,
                             seed);
  fs::create_directories(out);
  save_frames(v.X, out / "frames");
  Tensor3d mask(m, n, frames);
  for (std::size_t i = 0; i < mask.data().size(); ++i)
    mask.data()[i] = v.fg_mask.data()[i] ? 1.0 : 0.0;
  save_frames(mask, out / "mask");
  write_pgm(out / "bg.pgm", v.bg * 255.0);
  write_mct1(out / "X.mct1", v.X);
  write_mct1(out / "mask.mct1", mask);
  json j{{"dims", {m, n, frames}}, {"square", square},
         {"motion", motion},       {"seed", seed},
         {"out", out.string()}};
  if (json_out)
    std::cout << j.dump(2) << "\n";
  else
    std::cout << "synthetic sequence " << m << "x" << n << "x" << frames
              << " written to " << out.string() << "\n";
  return 0;
}

int run_transform_info(const TransformFlags& tf, Index p,
                       const std::string& input, std::uint64_t seed,
                       bool json_out) {
  Tensor3d data;
  const Tensor3d* dptr = nullptr;
  if (!input.empty()) {
    data = load_tensor_or_frames(input);
    p = data.slices();
    dptr = &data;
  }
  if (p < 1) throw CLI::ValidationError("--p or --input is required");
  TransformSpec spec = tf.spec(p);
  TransformMatrix M = build_transform(spec, dptr, seed);
  const MatrixXcd MMp = M.cplx() * M.cplx_pinv();
  const MatrixXcd MpM = M.cplx_pinv() * M.cplx();
  const double right_res =
      (MMp - MatrixXcd::Identity(spec.q, spec.q)).norm();
  const double left_res = (MpM - MatrixXcd::Identity(spec.p, spec.p)).norm();
  json j{{"spec", spec_to_json(spec)},
         {"is_real", M.is_real()},
         {"right_inverse_residual", right_res},
         {"left_inverse_residual", left_res}};
  if (json_out) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << to_string(spec.family) << " " << to_string(spec.regime)
              << " M in K^(" << spec.q << "x" << spec.p << ")\n"
              << "  ||M M+ - I|| = " << right_res << "\n"
              << "  ||M+ M - I|| = " << left_res << "\n";
  }
  return 0;
}

template <class T>
json decompose_one(const Tensor3<T>& A, const TransformMatrix& M, Index rank,
                   const fs::path& factors_out) {
  auto [I, J] = qdeim_select(A, M, rank);
  CurFactors<T> f = mcur_decompose(A, M, I, J);
  ExactnessReport rep = verify_exactness(A, f, M);
  if (!factors_out.empty()) {
    fs::create_directories(factors_out);
    write_mct1(factors_out / "C.mct1", f.C);
    write_mct1(factors_out / "U_pinv.mct1", f.U_pinv);
    write_mct1(factors_out / "R.mct1", f.R);
  }
  return json{{"I", indices_to_json(I)},
              {"J", indices_to_json(J)},
              {"spec", spec_to_json(M.spec())},
              {"multirank_A", rep.multirank_A.ranks},
              {"multirank_U", rep.multirank_U.ranks},
              {"rel_error", rep.rel_error},
              {"rank_condition_met", rep.rank_condition_met}};
}

int run_decompose(const std::string& input, const TransformFlags& tf,
                  Index rank, std::uint64_t seed, const std::string& idx_out,
                  const std::string& factors_out, bool json_out) {
  Tensor3d A = load_tensor_or_frames(input);
  TransformSpec spec = tf.spec(A.slices());
  TransformMatrix M = build_transform(spec, &A, seed);
  json manifest = M.is_real()
                      ? decompose_one(A, M, rank, factors_out)
                      : decompose_one(to_complex(A), M, rank, factors_out);
  if (!factors_out.empty())
    write_json(fs::path(factors_out) / "manifest.json", manifest);
  if (!idx_out.empty())
    write_json(idx_out, json{{"I", manifest["I"]}, {"J", manifest["J"]}});
  if (json_out) {
    std::cout << manifest.dump(2) << "\n";
  } else {
    std::cout << "rank-" << rank << " " << to_string(spec.family)
              << " *_M-CUR:  I = " << one_based(manifest["I"])
              << "  J = " << one_based(manifest["J"])
              << "  rel_error = " << manifest["rel_error"]
              << "  rank_condition_met = " << manifest["rank_condition_met"]
              << "\n";
  }
  return 0;
}

int run_separate(const std::string& input, const TransformFlags& tf,
                 SeparationConfig cfg, const fs::path& out, bool dump_frames,
                 bool json_out) {
  Tensor3d X = load_tensor_or_frames(input);
  cfg.transform = tf.spec(X.slices());
  auto [res, secs] = time_block([&] { return separate(X, cfg); });
  fs::create_directories(out);
  write_mct1(out / "L.mct1", res.L);
  write_mct1(out / "S.mct1", res.S);
  std::ofstream trace(out / "trace.csv");
  trace << "iter,residual,zeta,elapsed_seconds\n";
  for (const auto& r : res.trace)
    trace << r.iter << "," << r.residual << "," << r.zeta << ","
          << r.elapsed_seconds << "\n";
  if (dump_frames) {
    save_frames(res.L, out / "L_frames");
    save_frames(res.S, out / "S_frames", "sframe");
  }
  json j{{"converged", res.converged},
         {"iterations", res.trace.size()},
         {"final_residual",
          res.trace.empty() ? 0.0 : res.trace.back().residual},
         {"out", out.string()}};
  if (json_out) {
    j["runtime_seconds"] = secs;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "separation " << (res.converged ? "converged" : "stopped")
              << " after " << res.trace.size() << " iterations in " << secs
              << " s, residual "
              << (res.trace.empty() ? 0.0 : res.trace.back().residual) << "\n";
  }
  return 0;
}

int run_eval(const std::string& est, const std::string& gt, double tau,
             bool scale255, const std::string& report, bool json_out) {
  Tensor3d est_t = load_tensor_or_frames(est);
  Tensor3d gt_t;
  if (fs::is_directory(gt)) {
    gt_t = load_frames(gt);
  } else if (fs::path(gt).extension() == ".pgm") {
    MatrixXd img = read_pgm(gt) / 255.0;
    gt_t = Tensor3d(img.rows(), img.cols(), 1);
    gt_t.slice(0) = img;
  } else {
    gt_t = read_mct1_real(gt);
  }
  if (scale255) {
    // both sides already on 0-255
  }
  MetricOptions opts;
  opts.tau = tau;
  opts.scale255 = scale255;
  auto [rep, secs] = time_block([&] { return evaluate(est_t, gt_t, opts); });
  json j{{"avg", {{"age", rep.avg_age}, {"peps", rep.avg_peps},
                  {"psnr", rep.avg_psnr}}},
         {"inf_psnr_frames", rep.inf_psnr_frames},
         {"per_frame", json::array()}};
  for (const auto& fm : rep.per_frame)
    j["per_frame"].push_back(
        {{"age", fm.age}, {"peps", fm.peps}, {"psnr", fm.psnr}});
  if (!report.empty()) write_json(report, j);
  j["runtime_seconds"] = secs;
  if (json_out) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "AGE " << rep.avg_age << "  pEPs " << rep.avg_peps
              << "  PSNR " << rep.avg_psnr << " dB (" << rep.inf_psnr_frames
              << " exact frames)\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* env = std::getenv("MCUR_THREADS")) {
#ifdef _OPENMP
    const int n = std::atoi(env);
    if (n > 0) omp_set_num_threads(n);
#else
    (void)env;
#endif
  }

  CLI::App app{"*_M-product tensor CUR toolkit"};
  app.require_subcommand(1);
  bool json_out = false;
  app.add_flag("--json", json_out, "machine-readable output");

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic sequence");
  std::string synth_out;
  Index sm = 64, sn = 64, sp = 30, ssquare = 8;
  std::string smotion = "linear";
  std::uint64_t sseed = 42;
  synth->add_option("--out", synth_out, "output directory")->required();
  synth->add_option("--m", sm, "frame height");
  synth->add_option("--n", sn, "frame width");
  synth->add_option("--frames", sp, "number of frames");
  synth->add_option("--square", ssquare, "foreground square size");
  synth->add_option("--motion", smotion)
      ->check(CLI::IsMember({"none", "linear"}));
  synth->add_option("--seed", sseed, "rng seed");

  // transform-info
  auto* tinfo = app.add_subcommand("transform-info", "inspect a transform");
  TransformFlags ti_tf;
  ti_tf.attach(tinfo);
  Index ti_p = 0;
  std::string ti_input;
  std::uint64_t ti_seed = 0;
  tinfo->add_option("--p", ti_p, "source tube length");
  tinfo->add_option("--input", ti_input, "data tensor (for u3)");
  tinfo->add_option("--seed", ti_seed, "rng seed");

  // decompose
  auto* dec = app.add_subcommand("decompose", "tensor CUR decomposition");
  TransformFlags dec_tf;
  dec_tf.attach(dec);
  std::string dec_input, dec_idx_out, dec_factors_out;
  Index dec_rank = 1;
  std::uint64_t dec_seed = 0;
  dec->add_option("--input", dec_input, "MCT1 file or frames dir")->required();
  dec->add_option("--rank", dec_rank, "target multirank")->required();
  dec->add_option("--seed", dec_seed, "rng seed");
  dec->add_option("--indices-out", dec_idx_out, "write I,J as JSON");
  dec->add_option("--factors-out", dec_factors_out,
                  "write C,U_pinv,R and manifest");

  // separate
  auto* sep = app.add_subcommand("separate", "low-rank + sparse separation");
  TransformFlags sep_tf;
  sep_tf.attach(sep);
  std::string sep_input, sep_out;
  SeparationConfig cfg;
  bool sep_frames = false;
  sep->add_option("--input", sep_input, "MCT1 file or frames dir")->required();
  sep->add_option("--rank", cfg.rank, "background multirank")->required();
  sep->add_option("--zeta0", cfg.zeta0, "initial threshold");
  sep->add_option("--gamma", cfg.gamma, "threshold decay in (0,1)");
  sep->add_option("--max-iters", cfg.max_iters);
  sep->add_option("--tol", cfg.tol, "residual-change stopping tolerance");
  sep->add_flag("--resample", cfg.resample_indices,
                "re-select indices every iteration");
  sep->add_option("--seed", cfg.seed, "rng seed");
  sep->add_option("--out", sep_out, "output directory")->required();
  sep->add_flag("--frames", sep_frames, "also dump PGM frames of L and S");

  // eval
  auto* ev = app.add_subcommand("eval", "background metrics (AGE/pEPs/PSNR)");
  std::string ev_est, ev_gt, ev_report;
  double ev_tau = 20.0;
  bool ev_scale255 = false;
  ev->add_option("--est", ev_est, "estimated background")->required();
  ev->add_option("--gt", ev_gt, "ground-truth background")->required();
  ev->add_option("--tau", ev_tau, "pEPs threshold (0-255)");
  ev->add_flag("--scale255", ev_scale255, "inputs already on 0-255 scale");
  ev->add_option("--report", ev_report, "write JSON report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (synth->parsed())
      return run_synth(synth_out, sm, sn, sp, ssquare, smotion, sseed,
                       json_out);
    if (tinfo->parsed())
      return run_transform_info(ti_tf, ti_p, ti_input, ti_seed, json_out);
    if (dec->parsed())
      return run_decompose(dec_input, dec_tf, dec_rank, dec_seed, dec_idx_out,
                           dec_factors_out, json_out);
    if (sep->parsed())
      return run_separate(sep_input, sep_tf, cfg, sep_out, sep_frames,
                          json_out);
    if (ev->parsed())
      return run_eval(ev_est, ev_gt, ev_tau, ev_scale255, ev_report, json_out);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
