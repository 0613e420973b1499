#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "psml/codec.hpp"
#include "psml/pixel_grid.hpp"
#include "psml/psml_fit.hpp"

namespace {

using namespace psml;

std::string fmt_db(double v) {
  if (std::isinf(v)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return std::vector<std::uint8_t>((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            std::streamsize(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

struct CodecOptions {
  std::string codec = "psml";
  double lambda = -1.0;
  double bpp = -1.0;
  std::string gray_bits = "auto";
  int max_depth = 7;

  EncoderConfig to_config() const {
    EncoderConfig cfg;
    if (codec == "psml") {
      cfg.codec = CodecId::kPsml;
    } else if (codec == "wedgelet") {
      cfg.codec = CodecId::kWedgelet;
    } else {
      throw std::runtime_error("unknown codec: " + codec);
    }
    cfg.max_depth = max_depth;
    if (gray_bits == "auto") {
      cfg.gray_bits = 0;
    } else {
      cfg.gray_bits = std::stoi(gray_bits);
      if (cfg.gray_bits < 3 || cfg.gray_bits > 8)
        throw std::runtime_error("gray bits must be 3..8 or auto");
    }
    cfg.lambda = lambda;
    cfg.target_bpp = bpp;
    return cfg;
  }
};

void add_codec_options(CLI::App* cmd, CodecOptions& opt) {
  cmd->add_option("--codec", opt.codec, "psml or wedgelet")
      ->check(CLI::IsMember({"psml", "wedgelet"}));
  cmd->add_option("--lambda", opt.lambda, "rate-distortion multiplier");
  cmd->add_option("--bpp", opt.bpp, "target bits per pixel");
  cmd->add_option("--gray-bits", opt.gray_bits, "gray depth 3..8 or auto");
  cmd->add_option("--max-depth", opt.max_depth, "quadtree split generations")
      ->check(CLI::Range(0, 15));
}

int run_encode(const std::string& input, const std::string& output,
               const CodecOptions& opt) {
  PixelGrid img = load_pgm(input);
  EncodeOutput enc = encode(img, opt.to_config());
  write_file(output, enc.bytes);
  std::printf("bpp=%.6f psnr=%s q=%d lambda=%.6g bits=%lld\n", enc.point.bpp,
              fmt_db(enc.point.psnr_db).c_str(), enc.point.q, enc.point.lambda,
              static_cast<long long>(enc.point.total_bits));
  return 0;
}

int run_sweep(const std::vector<std::string>& inputs,
              const std::vector<double>& bpps, const std::vector<double>& lambdas,
              const std::vector<std::string>& codecs, const std::string& csv_path,
              const CodecOptions& base) {
  if (bpps.empty() == lambdas.empty())
    throw std::runtime_error("sweep: give exactly one of --bpp / --lambda lists");
  struct Row {
    std::string image, codec;
    double target = 0.0;
    bool ok = false;
    RateDistortionPoint pt;
    double ms = 0.0;
    std::string error;
  };
  std::vector<Row> rows;
  for (const std::string& input : inputs) {
    PixelGrid img = load_pgm(input);
    for (const std::string& codec : codecs) {
      std::size_t points = bpps.empty() ? lambdas.size() : bpps.size();
      for (std::size_t i = 0; i < points; ++i) {
        Row row;
        row.image = input;
        row.codec = codec;
        CodecOptions opt = base;
        opt.codec = codec;
        if (bpps.empty()) {
          opt.lambda = lambdas[i];
          row.target = -1.0;
        } else {
          opt.bpp = bpps[i];
          row.target = bpps[i];
        }
        auto t0 = std::chrono::steady_clock::now();
        try {
          EncodeOutput enc = encode(img, opt.to_config());
          row.pt = enc.point;
          row.ok = true;
        } catch (const std::exception& e) {
          row.error = e.what();
        }
        auto t1 = std::chrono::steady_clock::now();
        row.ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        rows.push_back(std::move(row));
      }
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.image != b.image) return a.image < b.image;
    if (a.codec != b.codec) return a.codec < b.codec;
    return a.pt.bpp < b.pt.bpp;
  });

  std::ostringstream csv;
  csv << "image,codec,target_bpp,achieved_bpp,compression_ratio,psnr_db,q,"
         "lambda,encode_ms,error\n";
  for (const Row& row : rows) {
    csv << row.image << ',' << row.codec << ',';
    if (row.target >= 0.0) csv << row.target;
    csv << ',';
    if (row.ok) {
      csv << row.pt.bpp << ',' << 8.0 / row.pt.bpp << ','
          << fmt_db(row.pt.psnr_db) << ',' << row.pt.q << ',' << row.pt.lambda;
    } else {
      csv << ",,,,";
    }
    csv << ',' << row.ms << ',' << row.error << '\n';
  }
  if (csv_path.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream out(csv_path);
    if (!out) throw std::runtime_error("cannot open " + csv_path);
    out << csv.str();
  }
  return 0;
}

int run_audit(int size, int trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> gray(0, 255);
  int exact = 0;
  double max_ratio = 1.0, sum_ratio = 0.0;
  std::int64_t total_moves = 0, total_orients = 0;
  for (int t = 0; t < trials; ++t) {
    PixelGrid img(size, size);
    for (auto& s : img.samples) s = std::uint8_t(gray(rng));
    PatchView patch(img, 0, 0, size, size);
    FitResult fast = fit_patch_fast(patch);
    FitResult oracle = fit_patch_exhaustive(patch, 16);
    double ratio = oracle.sse == 0.0 ? (fast.sse == 0.0 ? 1.0 : HUGE_VAL)
                                     : fast.sse / oracle.sse;
    if (fast.sse <= oracle.sse + 1e-6) ++exact;
    sum_ratio += ratio;
    if (ratio > max_ratio) max_ratio = ratio;
    total_moves += fast.iterations;
    total_orients += std::int64_t(orientations(size, size).candidates.size());
  }
  std::printf("patches=%d size=%dx%d\n", trials, size, size);
  std::printf("exact_hit_fraction=%.4f\n", double(exact) / trials);
  std::printf("mean_sse_ratio=%.6f max_sse_ratio=%.6f\n", sum_ratio / trials, max_ratio);
  std::printf("mean_moves_per_orientation=%.4f\n",
              double(total_moves) / double(total_orients));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PSML quadtree image codec"};
  app.require_subcommand(1);

  std::string input, input_b, output, csv_path;
  CodecOptions opt;

  auto* enc = app.add_subcommand("encode", "encode a PGM image");
  enc->add_option("--input", input)->required();
  enc->add_option("--output", output)->required();
  add_codec_options(enc, opt);

  auto* dec = app.add_subcommand("decode", "decode a codestream to PGM");
  dec->add_option("--input", input)->required();
  dec->add_option("--output", output)->required();

  auto* met = app.add_subcommand("psnr", "PSNR between two PGM images");
  met->add_option("--input", input)->required();
  met->add_option("--reference", input_b)->required();

  auto* sweep = app.add_subcommand("sweep", "rate-distortion sweep to CSV");
  std::vector<std::string> sweep_inputs, sweep_codecs{"psml"};
  std::vector<double> sweep_bpps, sweep_lambdas;
  sweep->add_option("--input", sweep_inputs)->required();
  sweep->add_option("--bpp", sweep_bpps, "target bpp list");
  sweep->add_option("--lambda", sweep_lambdas, "lambda list");
  sweep->add_option("--codec", sweep_codecs, "codecs to compare");
  sweep->add_option("--csv", csv_path, "output CSV path (default stdout)");
  sweep->add_option("--gray-bits", opt.gray_bits);
  sweep->add_option("--max-depth", opt.max_depth)->check(CLI::Range(0, 15));

  auto* synth = app.add_subcommand("synth", "generate a synthetic ridge image");
  int s_h = 128, s_w = 128, s_period = 8, s_contrast = 180;
  double s_angle = 0.0;
  std::uint64_t s_seed = 1;
  synth->add_option("--output", output)->required();
  synth->add_option("--height", s_h);
  synth->add_option("--width", s_w);
  synth->add_option("--period", s_period);
  synth->add_option("--angle", s_angle, "radians");
  synth->add_option("--contrast", s_contrast);
  synth->add_option("--seed", s_seed);

  auto* audit = app.add_subcommand("audit", "fast fit vs exhaustive oracle");
  int a_size = 6, a_trials = 100;
  std::uint64_t a_seed = 1;
  audit->add_option("--size", a_size)->check(CLI::Range(4, 12));
  audit->add_option("--trials", a_trials);
  audit->add_option("--seed", a_seed);

  CLI11_PARSE(app, argc, argv);

  try {
    if (enc->parsed()) return run_encode(input, output, opt);
    if (dec->parsed()) {
      psml::save_pgm(psml::decode(read_file(input)), output);
      return 0;
    }
    if (met->parsed()) {
      std::printf("%s\n", fmt_db(psml::psnr(psml::load_pgm(input),
                                            psml::load_pgm(input_b)))
                              .c_str());
      return 0;
    }
    if (sweep->parsed()) {
      CodecOptions base = opt;
      return run_sweep(sweep_inputs, sweep_bpps, sweep_lambdas, sweep_codecs,
                       csv_path, base);
    }
    if (synth->parsed()) {
      psml::save_pgm(psml::synth_ridge(s_h, s_w, s_period, s_angle, s_contrast, s_seed),
                     output);
      return 0;
    }
    if (audit->parsed()) return run_audit(a_size, a_trials, a_seed);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
