#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

#include "muellerkit/muellerkit.hpp"

namespace muellerkit::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::BadPath:
    case ErrorCode::BadMagic:
    case ErrorCode::UnsupportedVersion:
    case ErrorCode::BadHeader:
    case ErrorCode::TruncatedFile:
    case ErrorCode::TrailingData:
    case ErrorCode::DimOverflow:
    case ErrorCode::MissingPlane:
    case ErrorCode::InvalidArgument:
    case ErrorCode::InvalidFraction:
    case ErrorCode::TooFewSpecimens:
    case ErrorCode::EmptyInput:
    case ErrorCode::DOutOfRange:
      return kUsageOrIo;
    default:
      return kContractViolation;
  }
}

Dtype parse_float_dtype(const std::string& s) {
  if (s == "f32") return Dtype::F32;
  if (s == "f64") return Dtype::F64;
  throw Error(ErrorCode::InvalidArgument, "dtype must be f32 or f64");
}

std::string dtype_name(Dtype d) {
  switch (d) {
    case Dtype::F32: return "f32";
    case Dtype::F64: return "f64";
    case Dtype::U8: return "u8";
  }
  return "?";
}

/// Min-max scaled 8-bit binary PGM. Previews are for eyeballing only.
void write_preview(const fs::path& path, std::uint32_t h, std::uint32_t w, const std::vector<double>& values) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::BadPath, "cannot write " + path.string());
  f << "P5\n" << w << " " << h << "\n255\n";
  for (double v : values) {
    const double t = hi > lo ? (v - lo) / (hi - lo) : 0.0;
    f.put(static_cast<char>(static_cast<std::uint8_t>(std::lround(255.0 * t))));
  }
}

std::vector<std::uint8_t> label_plane(const fs::path& path, std::uint32_t& h, std::uint32_t& w) {
  const auto plane = io::read_plane(path);
  h = plane.height;
  w = plane.width;
  std::vector<std::uint8_t> out;
  out.reserve(plane.values.size());
  for (double v : plane.values) {
    if (!(v >= 0.0 && v <= 255.0 && v == std::floor(v)))
      throw Error(ErrorCode::InvalidArgument, path.string() + " is not an integer label plane");
    out.push_back(static_cast<std::uint8_t>(v));
  }
  return out;
}

std::string format_optional(const std::optional<double>& v) {
  if (!v) return "NA";
  std::ostringstream s;
  s.precision(17);
  s << *v;
  return s.str();
}

std::string format_double(double v) { return format_optional(v); }

struct Options {
  std::size_t workers = default_workers();

  std::string input;
  std::string output;
  double tol = kPhysicalTolerance;
  double clip = kProjectionClip;

  bool no_project = false;
  std::vector<std::size_t> wavelength_index;
  bool preview = false;
  std::string map_dtype = "f64";

  std::string synth_kind;
  std::uint32_t height = 1;
  std::uint32_t width = 1;
  std::vector<double> wavelengths{450.0};
  std::vector<double> params;
  std::uint64_t seed = 0;
  std::string cube_dtype = "f32";
  double gain = 1.0;

  int deg = 0;
  std::vector<std::string> flips;

  std::string preset;
  std::string bits;
  double fill = 0.0;

  std::string metric;
  std::string pred;
  std::string gt;
  std::vector<int> classes{0, 1};
  int positive = 1;

  std::string split_kind;
  std::uint64_t n = 0;
  double fraction = 1.0;
};

int cmd_validate(const Options& o, std::ostream& out, std::ostream& err) {
  const auto rep = io::validate_file(o.input, o.tol, o.workers);
  json j{{"file", o.input},
         {"height", rep.height},
         {"width", rep.width},
         {"bands", rep.bands},
         {"dtype", dtype_name(rep.dtype)},
         {"normalized", rep.normalized},
         {"m00_plane", rep.has_m00_plane},
         {"pixels", rep.pixels},
         {"nan_entries", rep.nan_entries},
         {"inf_entries", rep.inf_entries},
         {"zero_intensity_pixels", rep.zero_intensity_pixels},
         {"unphysical_pixels", rep.unphysical_pixels},
         {"normalization_violations", rep.normalization_violations},
         {"fraction_physical", rep.fraction_physical},
         {"clean", !rep.has_defects()}};
  j["mask"] = rep.mask_bits ? json(*rep.mask_bits) : json(nullptr);
  out << j.dump() << "\n";
  if (rep.has_defects()) err << "validate: defects found in " << o.input << "\n";
  return rep.has_defects() ? kFindings : kOk;
}

int cmd_project(const Options& o, std::ostream& out, std::ostream& err) {
  const auto cube = io::read_cube(o.input);
  const auto before = scan_cube(cube, o.tol, o.workers);
  const auto projected = project_cube(cube, o.clip, o.tol, o.workers);
  io::write_cube(projected, o.output);
  const std::size_t changed = before.reports.size() - before.physical_count;
  err << "project: " << changed << " of " << before.reports.size() << " matrices projected\n";
  out << json{{"file", o.output}, {"pixels", before.reports.size()}, {"projected", changed}, {"clip", o.clip}}.dump()
      << "\n";
  return kOk;
}

int cmd_decompose(const Options& o, std::ostream& out, std::ostream& err) {
  const auto cube = io::read_cube(o.input);
  DecomposeOptions opts;
  opts.project_unphysical = !o.no_project;
  opts.clip = o.clip;
  opts.tol_phys = o.tol;
  opts.wavelengths = o.wavelength_index;
  opts.workers = o.workers;
  err << "decompose: " << cube.height << "x" << cube.width << "x" << cube.bands() << " with " << o.workers
      << " worker(s)\n";
  const auto maps = decompose_cube(cube, opts);
  const fs::path dir = o.output;
  io::write_maps(maps, dir, parse_float_dtype(o.map_dtype));

  std::vector<std::size_t> selected = o.wavelength_index;
  if (selected.empty())
    for (std::size_t b = 0; b < cube.bands(); ++b) selected.push_back(b);
  if (cube.m00_plane) {
    const std::size_t plane = cube.pixels_per_plane();
    for (std::size_t b : selected) {
      io::Plane p{io::PlaneKind::M00, cube.height, cube.width, parse_float_dtype(o.map_dtype), cube.wavelengths_nm[b],
                  std::vector<double>(cube.m00_plane->begin() + static_cast<std::ptrdiff_t>(b * plane),
                                      cube.m00_plane->begin() + static_cast<std::ptrdiff_t>((b + 1) * plane))};
      io::write_plane(p, dir / io::plane_filename(io::PlaneKind::M00, cube.wavelengths_nm[b]));
    }
  }

  for (std::size_t s = 0; s < maps.bands.size(); ++s) {
    const auto& band = maps.bands[s];
    std::map<int, std::size_t> counts;
    for (auto st : band.status) ++counts[static_cast<int>(st)];
    if (o.preview) {
      write_preview(dir / io::plane_filename(io::PlaneKind::Delta, band.wavelength_nm, ".pgm"), maps.height,
                    maps.width, band.depolarization);
      write_preview(dir / io::plane_filename(io::PlaneKind::Ret, band.wavelength_nm, ".pgm"), maps.height, maps.width,
                    band.retardance);
      write_preview(dir / io::plane_filename(io::PlaneKind::Diat, band.wavelength_nm, ".pgm"), maps.height,
                    maps.width, band.diattenuation);
    }
    out << json{{"wavelength_nm", band.wavelength_nm},
                {"ok", counts[0]},
                {"degenerate_diattenuator", counts[1]},
                {"singular_depolarizer", counts[2]},
                {"unphysical_input", counts[3]}}
               .dump()
        << "\n";
    err << "decompose: band " << (s + 1) << "/" << maps.bands.size() << " done\n";
  }
  return kOk;
}

int cmd_synth(const Options& o, std::ostream& out, std::ostream&) {
  auto need = [&](std::size_t n, const char* what) {
    if (o.params.size() != n)
      throw Error(ErrorCode::InvalidArgument, std::string(o.synth_kind) + " needs --params " + what);
  };
  MuellerMatrix m = MuellerMatrix::identity();
  MuellerCube cube;
  bool per_pixel = false;
  if (o.synth_kind == "identity") {
    need(0, "(none)");
  } else if (o.synth_kind == "depolarizer") {
    need(3, "a,b,c");
    m = make_diagonal_depolarizer(o.params[0], o.params[1], o.params[2]);
  } else if (o.synth_kind == "retarder") {
    need(2, "theta,delta");
    m = make_linear_retarder(o.params[0], o.params[1]);
  } else if (o.synth_kind == "diattenuator") {
    need(3, "dx,dy,dz");
    m = make_diattenuator({o.params[0], o.params[1], o.params[2]});
  } else if (o.synth_kind == "composed") {
    std::vector<double> p = o.params;
    if (p.empty()) p = {0.7, 0.6, 0.5, std::numbers::pi / 8.0, 1.0, 0.3, 0.1, 0.0};
    if (p.size() != 8) throw Error(ErrorCode::InvalidArgument, "composed needs --params a,b,c,theta,delta,dx,dy,dz");
    m = CompositionParams{{p[0], p[1], p[2]}, p[3], p[4], {p[5], p[6], p[7]}}.matrix();
  } else if (o.synth_kind == "random-physical") {
    need(0, "(none; use --seed)");
    cube = random_physical_cube(o.height, o.width, o.wavelengths, o.seed, o.gain);
    per_pixel = true;
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown synth kind " + o.synth_kind);
  }
  if (!per_pixel) cube = MuellerCube(o.height, o.width, o.wavelengths, o.gain * m);
  cube.storage = parse_float_dtype(o.cube_dtype);
  io::write_cube(cube, o.output);
  out << json{{"file", o.output}, {"kind", o.synth_kind}, {"height", o.height}, {"width", o.width},
              {"bands", o.wavelengths.size()}}
             .dump()
      << "\n";
  return kOk;
}

int cmd_rotate(const Options& o, std::ostream& out, std::ostream&) {
  SpatialTransform t;
  t.rotation = static_cast<QuarterTurn>(o.deg / 90);
  for (const auto& f : o.flips) {
    if (f == "h") t.flip_h = !t.flip_h;
    if (f == "v") t.flip_v = !t.flip_v;
  }
  const auto cube = rotate_cube(io::read_cube(o.input), t);
  io::write_cube(cube, o.output);
  out << json{{"file", o.output}, {"height", cube.height}, {"width", cube.width}}.dump() << "\n";
  return kOk;
}

int cmd_mask(const Options& o, std::ostream& out, std::ostream&) {
  ElementMask mask;
  if (!o.preset.empty()) {
    auto p = ElementMask::preset(o.preset);
    if (!p) throw Error(ErrorCode::InvalidArgument, "unknown mask preset " + o.preset);
    mask = *p;
  } else if (!o.bits.empty()) {
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(o.bits, &used, 0);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != o.bits.size() || v > 0xFFFF) throw Error(ErrorCode::InvalidArgument, "--bits must be a 16-bit word");
    mask = ElementMask(static_cast<std::uint16_t>(v));
  } else {
    throw Error(ErrorCode::InvalidArgument, "mask needs --preset or --bits");
  }
  const auto cube = apply_mask(io::read_cube(o.input), mask, o.fill);
  io::write_cube(cube, o.output);
  char hex[8];
  std::snprintf(hex, sizeof hex, "0x%04X", static_cast<unsigned>(mask.bits()));
  out << json{{"file", o.output}, {"mask", hex}}.dump() << "\n";
  return kOk;
}

int cmd_metrics(const Options& o, std::ostream& out, std::ostream&) {
  std::uint32_t ph = 0, pw = 0, gh = 0, gw = 0;
  const auto pred = label_plane(o.pred, ph, pw);
  const auto gt = label_plane(o.gt, gh, gw);
  if (ph != gh || pw != gw) throw Error(ErrorCode::DimensionMismatch, "pred and gt planes differ in size");
  out << "metric,class,value\n";
  if (o.metric == "dice") {
    std::vector<std::uint8_t> ids;
    for (int c : o.classes) {
      if (c < 0 || c > 254) throw Error(ErrorCode::InvalidArgument, "class ids must be in 0..254");
      ids.push_back(static_cast<std::uint8_t>(c));
      out << "dice," << c << "," << format_double(eval::dice(pred, gt, static_cast<std::uint8_t>(c))) << "\n";
    }
    out << "macro_dice,all," << format_double(eval::macro_dice(pred, gt, ids)) << "\n";
  } else {
    if (o.positive < 0 || o.positive > 254) throw Error(ErrorCode::InvalidArgument, "--positive must be in 0..254");
    const auto conf = eval::confusion(pred, gt, static_cast<std::uint8_t>(o.positive));
    const auto m = eval::classify_metrics(conf);
    out << "accuracy," << o.positive << "," << format_optional(m.accuracy) << "\n";
    out << "sensitivity," << o.positive << "," << format_optional(m.sensitivity) << "\n";
    out << "specificity," << o.positive << "," << format_optional(m.specificity) << "\n";
    out << "tp," << o.positive << "," << conf.tp << "\n";
    out << "fp," << o.positive << "," << conf.fp << "\n";
    out << "tn," << o.positive << "," << conf.tn << "\n";
    out << "fn," << o.positive << "," << conf.fn << "\n";
  }
  return kOk;
}

int cmd_split(const Options& o, std::ostream& out, std::ostream&) {
  if (o.split_kind == "few-shot") {
    const auto idx = eval::fewshot_indices({o.n, o.fraction, o.seed});
    out << "index\n";
    for (auto i : idx) out << i << "\n";
  } else if (o.split_kind == "nested-cv") {
    if (o.n > std::numeric_limits<std::uint32_t>::max())
      throw Error(ErrorCode::InvalidArgument, "too many specimens");
    const auto splits = eval::nested_cv_splits(static_cast<std::uint32_t>(o.n));
    for (std::size_t k = 0; k < splits.size(); ++k)
      out << json{{"split", k}, {"test", splits[k].test}, {"val", splits[k].val}, {"train", splits[k].train}}.dump()
          << "\n";
  } else {
    const auto s = eval::train_val_test_split(o.n, o.seed);
    out << "set,index\n";
    for (auto i : s.train) out << "train," << i << "\n";
    for (auto i : s.val) out << "val," << i << "\n";
    for (auto i : s.test) out << "test," << i << "\n";
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Mueller-matrix cube toolkit: validation, projection, Lu-Chipman decomposition, augmentation",
               "muellerkit"};
  app.set_version_flag("--version", std::string(kVersion));
  app.set_config("--config", "", "TOML/INI file with the same keys as the flags; flags win");
  app.option_defaults()->always_capture_default();
  app.add_option("--workers", o.workers, "Worker threads (default: MUELLERKIT_WORKERS or hardware threads)")
      ->check(CLI::PositiveNumber);
  app.require_subcommand(1);

  auto* validate = app.add_subcommand("validate", "Report NaN/Inf, zero-intensity and unphysical pixels");
  validate->add_option("input", o.input, "Input .mmc cube")->required();
  validate->add_option("--tol", o.tol, "Physicality tolerance on the smallest coherency eigenvalue");

  auto* project = app.add_subcommand("project", "Project unphysical matrices onto the physical set");
  project->add_option("input", o.input, "Input .mmc cube")->required();
  project->add_option("output", o.output, "Output .mmc cube")->required();
  project->add_option("--clip", o.clip, "Value negative eigenvalues are raised to")->check(CLI::NonNegativeNumber);
  project->add_option("--tol", o.tol, "Physicality tolerance");

  auto* decompose = app.add_subcommand("decompose", "Lu-Chipman parameter maps for every pixel");
  decompose->add_option("input", o.input, "Input .mmc cube")->required();
  decompose->add_option("outdir", o.output, "Directory for .mmp plane files")->required();
  decompose->add_flag("--no-project", o.no_project, "Decompose unphysical matrices without projecting them");
  decompose->add_option("--wavelength", o.wavelength_index, "Band index to decompose (repeatable)");
  decompose->add_flag("--preview", o.preview, "Also write 8-bit PGM previews");
  decompose->add_option("--clip", o.clip, "Projection clip value")->check(CLI::NonNegativeNumber);
  decompose->add_option("--tol", o.tol, "Physicality tolerance");
  decompose->add_option("--dtype", o.map_dtype, "Parameter plane precision")->check(CLI::IsMember({"f32", "f64"}));

  auto* synth = app.add_subcommand("synth", "Write an analytic test cube");
  synth->add_option("kind", o.synth_kind, "identity|depolarizer|retarder|diattenuator|composed|random-physical")
      ->required()
      ->check(CLI::IsMember({"identity", "depolarizer", "retarder", "diattenuator", "composed", "random-physical"}));
  synth->add_option("output", o.output, "Output .mmc cube")->required();
  synth->add_option("--height", o.height)->check(CLI::PositiveNumber);
  synth->add_option("--width", o.width)->check(CLI::PositiveNumber);
  synth->add_option("--wavelengths", o.wavelengths, "Comma-separated nm values")->delimiter(',');
  synth->add_option("--params", o.params, "Comma-separated element parameters")->delimiter(',');
  synth->add_option("--seed", o.seed);
  synth->add_option("--gain", o.gain, "Multiplies every matrix (unnormalized intensity)");
  synth->add_option("--dtype", o.cube_dtype)->check(CLI::IsMember({"f32", "f64"}));

  auto* rotate = app.add_subcommand("rotate", "Exact rotation/mirror of a cube with matching frame rotation");
  rotate->add_option("input", o.input)->required();
  rotate->add_option("output", o.output)->required();
  rotate->add_option("--deg", o.deg, "Counter-clockwise rotation")->check(CLI::IsMember({0, 90, 180, 270}));
  rotate->add_option("--flip", o.flips, "Mirror axis h or v (repeatable)")->check(CLI::IsMember({"h", "v"}));

  auto* mask = app.add_subcommand("mask", "Zero out unmeasured Mueller elements");
  mask->add_option("input", o.input)->required();
  mask->add_option("output", o.output)->required();
  auto* preset = mask->add_option("--preset", o.preset, "full|ul3x3|first-row-col|linear-only")
                     ->check(CLI::IsMember({"full", "ul3x3", "first-row-col", "linear-only"}));
  auto* bits = mask->add_option("--bits", o.bits, "16-bit word, bit 4*i+j keeps m(i,j), e.g. 0x0777");
  preset->excludes(bits);
  mask->add_option("--fill", o.fill, "Value written into masked elements");

  auto* metrics = app.add_subcommand("metrics", "Dice or classification metrics between label planes");
  metrics->add_option("metric", o.metric, "dice|cls")->required()->check(CLI::IsMember({"dice", "cls"}));
  metrics->add_option("--pred", o.pred, "Predicted label plane (.mmp)")->required();
  metrics->add_option("--gt", o.gt, "Ground-truth label plane (.mmp)")->required();
  metrics->add_option("--classes", o.classes, "Class ids for dice")->delimiter(',');
  metrics->add_option("--positive", o.positive, "Positive class for cls");

  auto* split = app.add_subcommand("split", "Few-shot subsets and cross-validation partitions");
  split->add_option("kind", o.split_kind, "few-shot|nested-cv|train-val-test")
      ->required()
      ->check(CLI::IsMember({"few-shot", "nested-cv", "train-val-test"}));
  split->add_option("--n", o.n, "Number of items (or specimens)")->required();
  split->add_option("--fraction", o.fraction, "Few-shot fraction in (0, 1]");
  split->add_option("--seed", o.seed);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageOrIo;
  }

  try {
    if (*validate) return cmd_validate(o, out, err);
    if (*project) return cmd_project(o, out, err);
    if (*decompose) return cmd_decompose(o, out, err);
    if (*synth) return cmd_synth(o, out, err);
    if (*rotate) return cmd_rotate(o, out, err);
    if (*mask) return cmd_mask(o, out, err);
    if (*metrics) return cmd_metrics(o, out, err);
    if (*split) return cmd_split(o, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsageOrIo;
  }
  return kUsageOrIo;
}

}  // namespace muellerkit::cli
