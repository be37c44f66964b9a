//---------------------------------------------------------------------------
// Command-line front end. Every subcommand echoes its fully resolved
// configuration as the first element of the output, prints floats with 17
// significant digits, and is byte-reproducible for identical inputs.
//
// Exit codes: 0 success (for verify: every claim passed), 1 domain error or
// failing verification claims, 2 malformed command line.
//---------------------------------------------------------------------------

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "whittlekf/bandit.hpp"
#include "whittlekf/errors.hpp"
#include "whittlekf/index.hpp"
#include "whittlekf/json_io.hpp"
#include "whittlekf/moebius.hpp"
#include "whittlekf/parallel.hpp"
#include "whittlekf/rational.hpp"
#include "whittlekf/threshold.hpp"
#include "whittlekf/verify.hpp"
#include "whittlekf/words.hpp"

namespace wk = whittlekf;

namespace {

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot open output file: " + out_path);
  f << text;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Shared single-arm parameter flags.
struct ArmFlags {
  double a = 0.0;
  double b = 1.0;
  double w = 1.0;
  double h = 0.0;
  double beta = 0.5;

  void add_ab(CLI::App* sub) {
    sub->add_option("--a", a, "passive observation precision")->capture_default_str();
    sub->add_option("--b", b, "active observation precision")->capture_default_str();
  }
  void add_all(CLI::App* sub) {
    add_ab(sub);
    sub->add_option("--w", w, "variance weight")->capture_default_str();
    sub->add_option("--h", h, "activation cost")->capture_default_str();
    sub->add_option("--beta", beta, "discount factor")->capture_default_str();
  }
  wk::ArmParams<double> params() const {
    wk::ArmParams<double> p;
    p.a = a;
    p.b = b;
    p.weight = w;
    p.cost = h;
    p.beta = beta;
    wk::validate(p);
    return p;
  }
  void echo_ab(wk::JsonWriter& j) const {
    j.key("a").value(a);
    j.key("b").value(b);
  }
  void echo_all(wk::JsonWriter& j) const {
    echo_ab(j);
    j.key("w").value(w);
    j.key("h").value(h);
    j.key("beta").value(beta);
  }
};

void write_classification(wk::JsonWriter& j, const wk::ThresholdClassification& cls) {
  j.key("word").value(cls.word.str());
  j.key("period").value(static_cast<unsigned long long>(cls.period));
  j.key("is_boundary").value(cls.is_boundary);
  j.key("conclusive").value(cls.conclusive);
  j.key("interval_lo").value(cls.interval_lo);
  j.key("interval_hi").value(cls.interval_hi);
  if (!cls.conclusive) {
    j.key("bracket_lo").value(cls.bracket_lo.str());
    j.key("bracket_hi").value(cls.bracket_hi.str());
    j.key("lo_endpoint").value(cls.lo_endpoint);
    j.key("hi_endpoint").value(cls.hi_endpoint);
  }
}

void write_index_point(wk::JsonWriter& j, const wk::IndexPoint& p) {
  j.key("x").value(p.x);
  j.key("lambda").value(p.lambda);
  j.key("word").value(p.word.str());
  j.key("method").value(wk::to_string(p.method));
  j.key("trunc_error_bound").value(p.trunc_error_bound);
}

//-------------------------------------------------------------- verify ----

std::vector<wk::Word> palindromes_up_to(std::size_t max_len) {
  std::vector<wk::Word> out;
  out.push_back(wk::Word(""));
  for (std::size_t L = 1; L <= max_len; ++L) {
    const std::size_t half = (L + 1) / 2;
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << half); ++bits) {
      std::string s(half, '0');
      for (std::size_t i = 0; i < half; ++i) {
        if ((bits >> (half - 1 - i)) & 1) s[i] = '1';
      }
      for (std::size_t i = L - half; i-- > 0;) s += s[i];
      out.push_back(wk::Word(s));
    }
  }
  return out;
}

struct VerifyOptions {
  std::string suite = "all";
  std::string mode = "exact";
  ArmFlags arm;
  std::size_t max_len = 9;  // palindrome length cap
  int reps = 2;             // alternation repetitions in the palindrome claims
  int delta_k = 6;          // prefix-sum identity repetitions
  int depth = 5;            // tree depth for the majorisation suite
  int blocks = 2;           // orbit blocks per word
  int samples = 20;         // sample points above the majorisation point
  int boundary_k = 20;
};

template <class Scalar>
wk::ArmParams<Scalar> lift_params(const ArmFlags& arm) {
  wk::ArmParams<Scalar> p;
  p.a = Scalar(arm.a);
  p.b = Scalar(arm.b);
  p.weight = Scalar(arm.w);
  p.cost = Scalar(arm.h);
  p.beta = Scalar(arm.beta);
  wk::validate(p);
  return p;
}

template <class Scalar>
wk::VerifyReport run_palindrome_suite(const VerifyOptions& opt) {
  const wk::ArmParams<Scalar> P = lift_params<Scalar>(opt.arm);
  const std::vector<wk::Word> ps = palindromes_up_to(opt.max_len);
  std::vector<wk::VerifyReport> slot(ps.size());
  wk::parallel_for(ps.size(),
                   [&](std::size_t i) { slot[i] = wk::palindrome_matrix_claims(ps[i], P, opt.reps); });
  wk::VerifyReport rep;
  for (const wk::VerifyReport& s : slot) rep.merge(s);
  return rep;
}

template <class Scalar>
wk::VerifyReport run_delta_suite(const VerifyOptions& opt) {
  const wk::ArmParams<Scalar> P = lift_params<Scalar>(opt.arm);
  const std::vector<wk::Word> ps = palindromes_up_to(opt.max_len);
  std::vector<wk::VerifyReport> slot(ps.size());
  wk::parallel_for(ps.size(),
                   [&](std::size_t i) { slot[i] = wk::prefix_sum_identities(ps[i], P, opt.delta_k); });
  wk::VerifyReport rep;
  for (const wk::VerifyReport& s : slot) rep.merge(s);
  return rep;
}

template <class Scalar>
wk::VerifyReport run_major_suite(const VerifyOptions& opt) {
  const wk::ArmParams<Scalar> P = lift_params<Scalar>(opt.arm);
  const wk::ArmParams<double> Pd = opt.arm.params();
  std::vector<wk::Word> interiors;
  for (const wk::Word& c : wk::enumerate_tree(opt.depth)) {
    if (c.size() < 2) continue;  // boundary words have no interior
    interiors.push_back(c.size() == 2 ? wk::Word("") : wk::Word(c.str().substr(1, c.size() - 2)));
  }
  std::vector<wk::VerifyReport> slot(interiors.size());
  wk::parallel_for(interiors.size(), [&](std::size_t i) {
    const wk::Word& w = interiors[i];
    slot[i] = wk::majorisation_point_check(w, P, opt.blocks, opt.samples);
    // The weighted Schur comparison runs in floating point in either mode.
    const double xstar = wk::phi_zero_of_word(w, Pd);
    const std::string tag = "w=" + (w.empty() ? std::string("eps") : w.str());
    for (int s : {1, opt.samples}) {
      const double xs = xstar + s * (xstar + 1.0) / opt.samples;
      wk::ClaimResult c;
      try {
        const wk::OrbitBlock blk = wk::orbit_block(w, Pd, 0, xs);
        c = wk::schur_weighted_sum_check(blk.sigma_x, blk.sigma_y, Pd.beta);
      } catch (const std::exception& e) {
        c.pass = false;
        c.detail = e.what();
      }
      c.name = "major.schur[" + tag + ",s=" + std::to_string(s) + "]";
      slot[i].claims.push_back(c);
    }
  });
  wk::VerifyReport rep;
  for (const wk::VerifyReport& s : slot) rep.merge(s);
  return rep;
}

template <class Scalar>
wk::VerifyReport run_suites(const VerifyOptions& opt) {
  wk::VerifyReport rep;
  if (opt.suite == "all" || opt.suite == "palindrome") rep.merge(run_palindrome_suite<Scalar>(opt));
  if (opt.suite == "all" || opt.suite == "delta") rep.merge(run_delta_suite<Scalar>(opt));
  if (opt.suite == "all" || opt.suite == "major") rep.merge(run_major_suite<Scalar>(opt));
  if (opt.suite == "all" || opt.suite == "boundary") {
    rep.merge(wk::boundary_case_check(lift_params<Scalar>(opt.arm), opt.boundary_k));
  }
  return rep;
}

//--------------------------------------------------------------- curve ----

std::string curve_config_json(const ArmFlags& arm, double tol, double x_min, double x_max,
                              int points, const std::string& format) {
  wk::JsonWriter j;
  j.begin_object();
  j.key("subcommand").value("curve");
  arm.echo_all(j);
  j.key("tol").value(tol);
  j.key("x_min").value(x_min);
  j.key("x_max").value(x_max);
  j.key("points").value(points);
  j.key("format").value(format);
  j.end_object();
  return j.str();
}

std::string curve_csv(const std::string& config, const wk::IndexCurve& curve) {
  std::string out = "# config: " + config + "\n";
  out += "x,lambda,word,method,bound\n";
  for (const wk::IndexPoint& p : curve.points) {
    out += wk::fmt_double(p.x) + "," + wk::fmt_double(p.lambda) + "," + p.word.str() + "," +
           wk::to_string(p.method) + "," + wk::fmt_double(p.trunc_error_bound) + "\n";
  }
  return out;
}

std::string curve_json(const std::string& config, const wk::IndexCurve& curve) {
  wk::JsonWriter j;
  j.begin_object();
  j.key("config").raw(config);
  j.key("points").begin_array();
  for (const wk::IndexPoint& p : curve.points) {
    j.begin_object();
    j.key("x").value(p.x);
    j.key("lambda").value(p.lambda);
    j.key("word").value(p.word.str());
    j.key("method").value(wk::to_string(p.method));
    j.key("bound").value(p.trunc_error_bound);
    j.end_object();
  }
  j.end_array();
  j.key("monotone_within_bounds").value(curve.monotone_within_bounds);
  j.key("violations").begin_array();
  for (std::size_t i : curve.violation_indices) j.value(static_cast<unsigned long long>(i));
  j.end_array();
  j.end_object();
  return j.str() + "\n";
}

double parse_double_field(const std::string& s, const std::string& where) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument(where + " is not a number: " + s);
  }
  if (used != s.size()) throw std::invalid_argument(where + " is not a number: " + s);
  return v;
}

std::string reemit_curve_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("x,", 0) == 0) {
      out += line + "\n";
      continue;
    }
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
      if (i == line.size() || line[i] == ',') {
        fields.push_back(line.substr(start, i - start));
        start = i + 1;
      }
    }
    if (fields.size() != 5) throw std::invalid_argument("curve row needs 5 fields: " + line);
    out += wk::fmt_double(parse_double_field(fields[0], "x")) + "," +
           wk::fmt_double(parse_double_field(fields[1], "lambda")) + "," + fields[2] + "," +
           fields[3] + "," + wk::fmt_double(parse_double_field(fields[4], "bound")) + "\n";
  }
  return out;
}

void reemit_json_value(const nlohmann::ordered_json& j, wk::JsonWriter& w) {
  using J = nlohmann::ordered_json;
  switch (j.type()) {
    case J::value_t::object:
      w.begin_object();
      for (auto it = j.begin(); it != j.end(); ++it) {
        w.key(it.key());
        reemit_json_value(it.value(), w);
      }
      w.end_object();
      break;
    case J::value_t::array:
      w.begin_array();
      for (const auto& e : j) reemit_json_value(e, w);
      w.end_array();
      break;
    case J::value_t::string:
      w.value(j.get<std::string>());
      break;
    case J::value_t::boolean:
      w.value(j.get<bool>());
      break;
    case J::value_t::number_integer:
      w.value(static_cast<long long>(j.get<std::int64_t>()));
      break;
    case J::value_t::number_unsigned:
      w.value(static_cast<unsigned long long>(j.get<std::uint64_t>()));
      break;
    case J::value_t::number_float:
      w.value(j.get<double>());
      break;
    default:
      throw std::invalid_argument("curve file holds an unsupported JSON value");
  }
}

std::string reemit_curve(const std::string& text) {
  const std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) throw std::invalid_argument("curve file is empty");
  if (text[first] != '{') return reemit_curve_csv(text);
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("curve file is not valid JSON: ") + e.what());
  }
  wk::JsonWriter w;
  reemit_json_value(doc, w);
  return w.str() + "\n";
}

//------------------------------------------------------------ simulate ----

wk::Policy pick_policy(const std::string& name, std::uint64_t seed) {
  if (name == "whittle") return wk::whittle_policy();
  for (wk::Policy& p : wk::baseline_policies(seed)) {
    if (p.name == name) return p;
  }
  throw std::invalid_argument("unknown policy: " + name);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Whittle indexes and scheduling for scalar Kalman-filter arms"};
  app.require_subcommand(1);
  // Help stays on --help alone; -h would shadow the --h cost flag.
  app.set_help_flag("--help", "print this help and exit");
  const auto subcommand = [&](const char* name, const char* desc) {
    CLI::App* s = app.add_subcommand(name, desc);
    s->set_help_flag("--help", "print this help and exit");
    return s;
  };
  int exit_code = 0;

  // ---- word ----
  ArmFlags word_arm;
  double word_x = 1.0;
  std::string word_classifier = "tree";
  int word_max_depth = 32;
  std::size_t word_max_len = 4096;
  std::string word_out;
  CLI::App* word = subcommand("word", "classify a threshold value to its mechanical word");
  word->add_option("x,--x", word_x, "threshold value")->required();
  word_arm.add_ab(word);
  word->add_option("--classifier", word_classifier, "tree or orbit")
      ->check(CLI::IsMember({"tree", "orbit"}))
      ->capture_default_str();
  word->add_option("--max-depth", word_max_depth, "tree descent depth cap")->capture_default_str();
  word->add_option("--max-len", word_max_len, "orbit stream length cap")->capture_default_str();
  word->add_option("--out", word_out, "write to a file instead of stdout");
  word->callback([&] {
    const wk::ArmParams<double> p = word_arm.params();
    const wk::ThresholdClassification cls =
        word_classifier == "orbit" ? wk::threshold_word_by_orbit(word_x, p, word_max_len)
                                   : wk::threshold_word_by_tree(word_x, p, word_max_depth);
    wk::JsonWriter j;
    j.begin_object();
    j.key("config").begin_object();
    j.key("subcommand").value("word");
    j.key("x").value(word_x);
    word_arm.echo_ab(j);
    j.key("classifier").value(word_classifier);
    j.key("max_depth").value(word_max_depth);
    j.key("max_len").value(static_cast<unsigned long long>(word_max_len));
    j.end_object();
    write_classification(j, cls);
    j.end_object();
    emit(word_out, j.str() + "\n");
  });

  // ---- index ----
  ArmFlags index_arm;
  double index_x = 1.0;
  double index_tol = 1e-9;
  std::string index_method = "auto";
  std::string index_out;
  CLI::App* index = subcommand("index", "Whittle index at one threshold value");
  index->add_option("x,--x", index_x, "variance / threshold value")->required();
  index_arm.add_all(index);
  index->add_option("--tol", index_tol, "truncation tolerance")->capture_default_str();
  index->add_option("--method", index_method, "auto, series, or closed")
      ->check(CLI::IsMember({"auto", "series", "closed"}))
      ->capture_default_str();
  index->add_option("--out", index_out, "write to a file instead of stdout");
  index->callback([&] {
    const wk::ArmParams<double> p = index_arm.params();
    wk::IndexPoint pt;
    if (index_method == "series") {
      pt = wk::whittle_index_series(index_x, p, index_tol);
    } else if (index_method == "closed") {
      pt = wk::whittle_index_closed(index_x, wk::threshold_word_by_tree(index_x, p), p, index_tol);
    } else {
      pt = wk::whittle_index(index_x, p, index_tol);
    }
    wk::JsonWriter j;
    j.begin_object();
    j.key("config").begin_object();
    j.key("subcommand").value("index");
    j.key("x").value(index_x);
    index_arm.echo_all(j);
    j.key("tol").value(index_tol);
    j.key("method").value(index_method);
    j.end_object();
    write_index_point(j, pt);
    j.end_object();
    emit(index_out, j.str() + "\n");
  });

  // ---- curve ----
  ArmFlags curve_arm;
  double curve_tol = 1e-9;
  double curve_x_min = 0.0;
  double curve_x_max = 10.0;
  int curve_points = 1000;
  std::string curve_format = "csv";
  std::string curve_out, curve_reemit;
  CLI::App* curve = subcommand("curve", "Whittle index along a grid");
  curve_arm.add_all(curve);
  curve->add_option("--tol", curve_tol, "truncation tolerance")->capture_default_str();
  curve->add_option("--x-min", curve_x_min, "grid start")->capture_default_str();
  curve->add_option("--x-max", curve_x_max, "grid end")->capture_default_str();
  curve->add_option("--points", curve_points, "grid size")->capture_default_str();
  curve->add_option("--format", curve_format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  curve->add_option("--out", curve_out, "write to a file instead of stdout");
  curve->add_option("--reemit", curve_reemit,
                    "re-read a curve file and emit it again (round-trip check)");
  curve->callback([&] {
    if (!curve_reemit.empty()) {
      emit(curve_out, reemit_curve(read_file(curve_reemit)));
      return;
    }
    const wk::ArmParams<double> p = curve_arm.params();
    if (curve_points < 1) throw std::invalid_argument("grid needs at least one point");
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(curve_points));
    if (curve_points == 1) {
      grid.push_back(curve_x_min);
    } else {
      for (int i = 0; i < curve_points; ++i) {
        grid.push_back(curve_x_min +
                       (curve_x_max - curve_x_min) * static_cast<double>(i) /
                           static_cast<double>(curve_points - 1));
      }
    }
    const wk::IndexCurve c = wk::index_curve(p, grid, curve_tol);
    const std::string config = curve_config_json(curve_arm, curve_tol, curve_x_min, curve_x_max,
                                                 curve_points, curve_format);
    emit(curve_out, curve_format == "json" ? curve_json(config, c) : curve_csv(config, c));
  });

  // ---- fixed-point ----
  ArmFlags fp_arm;
  std::string fp_word;
  std::string fp_out;
  CLI::App* fixed = subcommand("fixed-point", "fixed point of the word's variance map");
  fixed->add_option("word,--word", fp_word, "binary word, leftmost letter acts first")->required();
  fp_arm.add_ab(fixed);
  fixed->add_option("--out", fp_out, "write to a file instead of stdout");
  fixed->callback([&] {
    const wk::ArmParams<double> p = fp_arm.params();
    const wk::FixedPoint fp = wk::fixed_point(wk::Word(fp_word), p);
    wk::JsonWriter j;
    j.begin_object();
    j.key("config").begin_object();
    j.key("subcommand").value("fixed-point");
    j.key("word").value(fp_word);
    fp_arm.echo_ab(j);
    j.end_object();
    j.key("value").value(fp.value);
    j.key("finite").value(fp.finite);
    j.end_object();
    emit(fp_out, j.str() + "\n");
  });

  // ---- tree ----
  int tree_depth = 3;
  std::string tree_format = "text";
  std::string tree_out;
  CLI::App* tree = subcommand("tree", "mechanical words of the tree to a depth");
  tree->add_option("depth,--depth", tree_depth, "tree depth")->required();
  tree->add_option("--format", tree_format, "text or json")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
  tree->add_option("--out", tree_out, "write to a file instead of stdout");
  tree->callback([&] {
    const std::vector<wk::Word> words = wk::enumerate_tree(tree_depth);
    wk::JsonWriter cfg;
    cfg.begin_object();
    cfg.key("subcommand").value("tree");
    cfg.key("depth").value(tree_depth);
    cfg.key("format").value(tree_format);
    cfg.end_object();
    if (tree_format == "json") {
      wk::JsonWriter j;
      j.begin_object();
      j.key("config").raw(cfg.str());
      j.key("words").begin_array();
      for (const wk::Word& w : words) j.value(w.str());
      j.end_array();
      j.end_object();
      emit(tree_out, j.str() + "\n");
    } else {
      std::string out = "# config: " + cfg.str() + "\n";
      for (const wk::Word& w : words) out += w.str() + "\n";
      emit(tree_out, out);
    }
  });

  // ---- verify ----
  VerifyOptions vo;
  std::string verify_out;
  CLI::App* verify = subcommand("verify", "certify the structural matrix identities");
  verify->add_option("--suite", vo.suite, "all, palindrome, delta, major, or boundary")
      ->check(CLI::IsMember({"all", "palindrome", "delta", "major", "boundary"}))
      ->capture_default_str();
  verify
      ->add_option("--mode", vo.mode,
                   "exact lifts the parameters to exact rationals; float uses pinned tolerances")
      ->check(CLI::IsMember({"exact", "float"}))
      ->capture_default_str();
  vo.arm.add_all(verify);
  verify->add_option("--max-len", vo.max_len, "palindrome length cap")->capture_default_str();
  verify->add_option("--reps", vo.reps, "alternation repetitions")->capture_default_str();
  verify->add_option("--delta-k", vo.delta_k, "prefix-sum repetitions")->capture_default_str();
  verify->add_option("--depth", vo.depth, "tree depth for the majorisation suite")
      ->capture_default_str();
  verify->add_option("--blocks", vo.blocks, "orbit blocks per word")->capture_default_str();
  verify->add_option("--samples", vo.samples, "sample points above the majorisation point")
      ->capture_default_str();
  verify->add_option("--boundary-k", vo.boundary_k, "boundary power cap")->capture_default_str();
  verify->add_option("--out", verify_out, "write to a file instead of stdout");
  verify->callback([&] {
    const wk::VerifyReport rep =
        vo.mode == "exact" ? run_suites<wk::Rational>(vo) : run_suites<double>(vo);
    std::size_t failures = 0;
    for (const wk::ClaimResult& c : rep.claims) {
      if (!c.pass) ++failures;
    }
    wk::JsonWriter j;
    j.begin_object();
    j.key("config").begin_object();
    j.key("subcommand").value("verify");
    j.key("suite").value(vo.suite);
    j.key("mode").value(vo.mode);
    vo.arm.echo_all(j);
    j.key("max_len").value(static_cast<unsigned long long>(vo.max_len));
    j.key("reps").value(vo.reps);
    j.key("delta_k").value(vo.delta_k);
    j.key("depth").value(vo.depth);
    j.key("blocks").value(vo.blocks);
    j.key("samples").value(vo.samples);
    j.key("boundary_k").value(vo.boundary_k);
    j.key("threads").value(static_cast<unsigned long long>(wk::thread_budget()));
    j.end_object();
    j.key("claims").begin_array();
    for (const wk::ClaimResult& c : rep.claims) {
      j.begin_object();
      j.key("name").value(c.name);
      j.key("pass").value(c.pass);
      if (!c.detail.empty()) j.key("detail").value(c.detail);
      j.end_object();
    }
    j.end_array();
    j.key("total").value(static_cast<unsigned long long>(rep.claims.size()));
    j.key("failures").value(static_cast<unsigned long long>(failures));
    j.key("all_pass").value(rep.all_pass());
    j.end_object();
    emit(verify_out, j.str() + "\n");
    if (failures) exit_code = 1;
  });

  // ---- simulate ----
  std::string sim_instance;
  std::string sim_policy = "whittle";
  std::uint64_t sim_seed = 0;
  bool sim_oracle = false;
  std::size_t sim_cap = 2000000;
  std::string sim_format = "json";
  std::string sim_out;
  CLI::App* simulate = subcommand("simulate", "deterministic multi-arm rollout");
  simulate->add_option("instance,--instance", sim_instance, "instance JSON file")->required();
  simulate
      ->add_option("--policy", sim_policy,
                   "whittle, myopic, round_robin, random, or never_observe")
      ->check(CLI::IsMember({"whittle", "myopic", "round_robin", "random", "never_observe"}))
      ->capture_default_str();
  simulate->add_option("--seed", sim_seed, "seed for the random policy")->capture_default_str();
  simulate->add_flag("--oracle", sim_oracle, "also run the exhaustive optimum");
  simulate->add_option("--cap", sim_cap, "oracle sequence budget")->capture_default_str();
  simulate->add_option("--format", sim_format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  simulate->add_option("--out", sim_out, "write to a file instead of stdout");
  simulate->callback([&] {
    const wk::BanditInstance inst = wk::load_instance_file(sim_instance);
    const wk::SimResult res = wk::simulate_policy(inst, pick_policy(sim_policy, sim_seed));
    wk::SimResult oracle;
    if (sim_oracle) oracle = wk::brute_force_optimal(inst, sim_cap);

    wk::JsonWriter cfg;
    cfg.begin_object();
    cfg.key("subcommand").value("simulate");
    cfg.key("policy").value(sim_policy);
    cfg.key("seed").value(static_cast<unsigned long long>(sim_seed));
    cfg.key("oracle").value(sim_oracle);
    cfg.key("cap").value(static_cast<unsigned long long>(sim_cap));
    cfg.key("format").value(sim_format);
    cfg.key("instance");
    wk::write_instance_config(cfg, inst);
    cfg.end_object();

    if (sim_format == "csv") {
      std::string out = "# config: " + cfg.str() + "\n";
      out += "# policy: " + res.policy_name + "\n";
      out += "# discounted_cost: " + wk::fmt_double(res.discounted_cost) + "\n";
      out += "# tail_bound: " + wk::fmt_double(res.tail_bound) + "\n";
      out += "t,arms";
      for (std::size_t i = 0; i < inst.arms.size(); ++i) out += ",x" + std::to_string(i);
      out += ",stage_cost\n";
      for (std::size_t t = 0; t < res.action_log.size(); ++t) {
        out += std::to_string(t) + ",";
        const std::vector<int>& ids = res.action_log[t];
        for (std::size_t k = 0; k < ids.size(); ++k) {
          if (k) out += ';';
          out += std::to_string(ids[k]);
        }
        for (double x : res.variance_log[t]) out += "," + wk::fmt_double(x);
        out += "," + wk::fmt_double(wk::stage_cost(inst, res.variance_log[t], ids)) + "\n";
      }
      if (sim_oracle) {
        out += "# oracle_cost: " + wk::fmt_double(oracle.discounted_cost) + "\n";
        out += "# oracle_actions: ";
        for (std::size_t t = 0; t < oracle.action_log.size(); ++t) {
          if (t) out += '|';
          const std::vector<int>& ids = oracle.action_log[t];
          for (std::size_t k = 0; k < ids.size(); ++k) {
            if (k) out += ';';
            out += std::to_string(ids[k]);
          }
        }
        out += "\n";
      }
      emit(sim_out, out);
      return;
    }

    wk::JsonWriter j;
    j.begin_object();
    j.key("config").raw(cfg.str());
    j.key("policy").value(res.policy_name);
    j.key("discounted_cost").value(res.discounted_cost);
    j.key("tail_bound").value(res.tail_bound);
    j.key("actions");
    wk::write_rows(j, res.action_log);
    j.key("variances");
    wk::write_rows(j, res.variance_log);
    if (sim_oracle) {
      j.key("oracle").begin_object();
      j.key("policy").value(oracle.policy_name);
      j.key("discounted_cost").value(oracle.discounted_cost);
      j.key("tail_bound").value(oracle.tail_bound);
      j.key("actions");
      wk::write_rows(j, oracle.action_log);
      j.end_object();
    }
    j.end_object();
    emit(sim_out, j.str() + "\n");
  });

  // ---- trace ----
  std::string trace_instance;
  std::string trace_policy = "whittle";
  std::uint64_t trace_seed = 0;
  std::string trace_out;
  CLI::App* trace = subcommand("trace", "sampled Kalman trajectory");
  trace->add_option("instance,--instance", trace_instance, "instance JSON file")->required();
  trace->add_option("--seed", trace_seed, "noise seed")->required();
  trace
      ->add_option("--policy", trace_policy,
                   "whittle, myopic, round_robin, random, or never_observe")
      ->check(CLI::IsMember({"whittle", "myopic", "round_robin", "random", "never_observe"}))
      ->capture_default_str();
  trace->add_option("--out", trace_out, "write to a file instead of stdout");
  trace->callback([&] {
    const wk::BanditInstance inst = wk::load_instance_file(trace_instance);
    const wk::KalmanTrace tr =
        wk::kalman_trace(inst, pick_policy(trace_policy, trace_seed), trace_seed);

    wk::JsonWriter j;
    j.begin_object();
    j.key("config").begin_object();
    j.key("subcommand").value("trace");
    j.key("policy").value(trace_policy);
    j.key("seed").value(static_cast<unsigned long long>(trace_seed));
    j.key("instance");
    wk::write_instance_config(j, inst);
    j.end_object();
    j.key("actions");
    wk::write_rows(j, tr.actions);
    j.key("z");
    wk::write_rows(j, tr.z);
    j.key("y");
    wk::write_rows(j, tr.y);
    j.key("zhat");
    wk::write_rows(j, tr.zhat);
    j.key("x");
    wk::write_rows(j, tr.x);
    j.end_object();
    emit(trace_out, j.str() + "\n");
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    const char* type = "error";
    if (dynamic_cast<const wk::resource_error*>(&e)) {
      type = "resource";
    } else if (dynamic_cast<const wk::singularity_error*>(&e)) {
      type = "singularity";
    } else if (dynamic_cast<const wk::conditioning_error*>(&e)) {
      type = "conditioning";
    } else if (dynamic_cast<const std::invalid_argument*>(&e)) {
      type = "invalid_argument";
    } else if (dynamic_cast<const std::logic_error*>(&e)) {
      type = "logic";
    }
    wk::JsonWriter j;
    j.begin_object();
    j.key("error").begin_object();
    j.key("type").value(type);
    j.key("message").value(e.what());
    j.end_object();
    j.end_object();
    std::cerr << j.str() << "\n";
    return 1;
  }
  return exit_code;
}
