#include "qfi/spec_file.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "qfi/errors.hpp"

namespace qfi {

namespace {

struct Value {
  enum class Kind { Word, Number, List } kind = Kind::Word;
  std::string word;
  Complex number;
  std::vector<Value> items;
  int column = 0;
};

struct Entry {
  int line = 0;
  int column = 0;
  // factors of an `x` product; ordinary values have one factor
  std::vector<Value> factors;
  std::string raw;
};

[[noreturn]] void fail(int line, int column, const std::string& what) {
  std::ostringstream msg;
  msg << "line " << line << ", column " << column << ": " << what;
  throw ValidationError(msg.str());
}

std::optional<Complex> parse_complex_raw(const std::string& s) {
  if (s.empty()) return std::nullopt;
  const char* begin = s.c_str();
  char* end = nullptr;
  if (s.back() != 'i') {
    const double re = std::strtod(begin, &end);
    if (end != begin + s.size() || end == begin) return std::nullopt;
    return Complex(re, 0.0);
  }
  // imaginary part present: split at the last sign that is not an exponent sign
  const std::string body = s.substr(0, s.size() - 1);
  std::size_t split = std::string::npos;
  for (std::size_t k = body.size(); k-- > 0;) {
    if ((body[k] == '+' || body[k] == '-') && (k == 0 || (body[k - 1] != 'e' && body[k - 1] != 'E'))) {
      split = k;
      break;
    }
  }
  auto parse_imag = [](const std::string& t) -> std::optional<double> {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    char* e = nullptr;
    const double v = std::strtod(t.c_str(), &e);
    if (e != t.c_str() + t.size()) return std::nullopt;
    return v;
  };
  double re = 0.0;
  std::string imag_text = body;
  if (split != std::string::npos && split > 0) {
    const std::string real_text = body.substr(0, split);
    const double v = std::strtod(real_text.c_str(), &end);
    if (end != real_text.c_str() + real_text.size() || real_text.empty()) return std::nullopt;
    re = v;
    imag_text = body.substr(split);
  }
  const auto im = parse_imag(imag_text);
  if (!im) return std::nullopt;
  return Complex(re, *im);
}

class LineParser {
 public:
  LineParser(std::string_view text, int line) : text_(text), line_(line) {}

  /// Column of text[0] minus one, for error positions.
  int offset = 0;

  std::vector<Value> parse_factors() {
    std::vector<Value> out;
    out.push_back(parse_value());
    skip_ws();
    while (pos_ < text_.size() && text_[pos_] == 'x') {
      ++pos_;
      skip_ws();
      if (pos_ >= text_.size() || text_[pos_] != '[') fail(line_, column(), "expected '[' after 'x'");
      out.push_back(parse_value());
      skip_ws();
    }
    if (pos_ != text_.size()) fail(line_, column(), "unexpected trailing text");
    return out;
  }

 private:
  int column() const { return static_cast<int>(pos_) + 1 + offset; }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  Value parse_value() {
    skip_ws();
    if (pos_ >= text_.size()) fail(line_, column(), "missing value");
    if (text_[pos_] == '[') return parse_list();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != ']' &&
           !std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    Value v;
    v.column = static_cast<int>(start) + 1 + offset;
    const std::string_view token = text_.substr(start, pos_ - start);
    if (token.empty()) fail(line_, v.column, "missing value");
    if (auto c = parse_complex(token)) {
      v.kind = Value::Kind::Number;
      v.number = *c;
    } else {
      v.kind = Value::Kind::Word;
      v.word = std::string(token);
    }
    return v;
  }

  Value parse_list() {
    Value v;
    v.kind = Value::Kind::List;
    v.column = column();
    ++pos_;
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == ']') {
      ++pos_;
      return v;
    }
    while (true) {
      v.items.push_back(parse_value());
      skip_ws();
      if (pos_ >= text_.size()) fail(line_, column(), "expected ',' or ']'");
      if (text_[pos_] == ']') {
        ++pos_;
        return v;
      }
      if (text_[pos_] != ',') fail(line_, column(), "expected ',' or ']'");
      ++pos_;
    }
  }

  std::string_view text_;
  int line_;
  std::size_t pos_ = 0;
};

double real_of(const Value& v, int line, const char* key) {
  if (v.kind != Value::Kind::Number) fail(line, v.column, std::string(key) + ": expected a number");
  if (v.number.imag() != 0.0) fail(line, v.column, std::string(key) + ": expected a real number");
  return v.number.real();
}

std::vector<double> reals_of(const Value& v, int line, const char* key) {
  if (v.kind != Value::Kind::List) fail(line, v.column, std::string(key) + ": expected a list");
  std::vector<double> out;
  for (const auto& item : v.items) out.push_back(real_of(item, line, key));
  return out;
}

ComplexVector complexes_of(const Value& v, int line, const char* key) {
  if (v.kind != Value::Kind::List) fail(line, v.column, std::string(key) + ": expected a list");
  ComplexVector out(static_cast<Eigen::Index>(v.items.size()));
  for (std::size_t i = 0; i < v.items.size(); ++i) {
    if (v.items[i].kind != Value::Kind::Number) fail(line, v.items[i].column, std::string(key) + ": expected a number");
    out[static_cast<Eigen::Index>(i)] = v.items[i].number;
  }
  return out;
}

ComplexMatrix matrix_of(const Value& v, int line, const char* key) {
  if (v.kind != Value::Kind::List || v.items.empty()) fail(line, v.column, std::string(key) + ": expected a matrix");
  const auto rows = static_cast<Eigen::Index>(v.items.size());
  Eigen::Index cols = -1;
  ComplexMatrix out;
  for (Eigen::Index r = 0; r < rows; ++r) {
    const ComplexVector row = complexes_of(v.items[static_cast<std::size_t>(r)], line, key);
    if (cols < 0) {
      cols = row.size();
      out.resize(rows, cols);
    } else if (row.size() != cols) {
      fail(line, v.items[static_cast<std::size_t>(r)].column, std::string(key) + ": ragged matrix rows");
    }
    out.row(r) = row.transpose();
  }
  return out;
}

const Value& single(const Entry& e, const char* key) {
  if (e.factors.size() != 1) fail(e.line, e.factors[1].column, std::string(key) + ": unexpected 'x' product");
  return e.factors.front();
}

bool is_indexed(const std::string& key, const std::string& stem, int& index) {
  if (key.rfind(stem, 0) != 0 || key.size() == stem.size()) return false;
  const std::string digits = key.substr(stem.size());
  if (!std::all_of(digits.begin(), digits.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
    return false;
  index = std::stoi(digits);
  return index >= 1;
}

bool is_spectral_family(const std::string& family) {
  return family == "example1" || family == "example2" || family == "custom-spectral";
}

std::string number_text(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string complex_text(const Complex& z) {
  if (z.imag() == 0.0) return number_text(z.real());
  std::string out = number_text(z.real());
  if (!std::signbit(z.imag())) out += "+";
  return out + number_text(z.imag()) + "i";
}

std::string list_text(const ComplexVector& v) {
  std::string out = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) out += (i ? ", " : "") + complex_text(v[i]);
  return out + "]";
}

std::string list_text(const RealVector& v) { return list_text(ComplexVector(v.cast<Complex>())); }

std::string matrix_text(const ComplexMatrix& m) {
  std::string out = "[";
  for (Eigen::Index r = 0; r < m.rows(); ++r) out += (r ? ", " : "") + list_text(ComplexVector(m.row(r).transpose()));
  return out + "]";
}

}  // namespace

std::optional<Complex> parse_complex(std::string_view text) {
  auto finite = [](std::optional<Complex> z) -> std::optional<Complex> {
    if (z && std::isfinite(z->real()) && std::isfinite(z->imag())) return z;
    return std::nullopt;
  };
  return finite(parse_complex_raw(std::string(text)));
}


ChannelSpec parse_channel_spec(std::string_view text) {
  static const std::set<std::string> kKeys{"name", "family", "theta_domain", "input_state", "axis", "f", "g",
                                           "dim",  "params", "p0",           "basis"};
  std::map<std::string, Entry> entries;
  std::istringstream in{std::string(text)};
  std::string line_text;
  int line = 0;
  while (std::getline(in, line_text)) {
    ++line;
    const std::size_t hash = line_text.find('#');
    const std::string content = line_text.substr(0, hash);
    const std::size_t first = content.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const std::size_t eq = content.find('=');
    if (eq == std::string::npos) fail(line, static_cast<int>(first) + 1, "expected 'key = value'");
    std::string key = content.substr(first, eq - first);
    key.erase(key.find_last_not_of(" \t") + 1);
    int index = 0;
    if (key.empty()) fail(line, static_cast<int>(first) + 1, "missing key");
    if (!kKeys.count(key) && !is_indexed(key, "slope", index) && !is_indexed(key, "generator", index))
      fail(line, static_cast<int>(first) + 1, "unknown key '" + key + "'");
    if (entries.count(key)) fail(line, static_cast<int>(first) + 1, "duplicate key '" + key + "'");

    std::string value = content.substr(eq + 1);
    value.erase(value.find_last_not_of(" \t\r") + 1);
    const std::size_t vstart = value.find_first_not_of(" \t");
    Entry e;
    e.line = line;
    e.column = static_cast<int>(first) + 1;
    e.raw = vstart == std::string::npos ? "" : value.substr(vstart);
    if (key == "name") {
      if (e.raw.empty()) fail(line, static_cast<int>(eq) + 2, "missing value");
    } else {
      LineParser parser(e.raw, line);
      parser.offset = static_cast<int>(eq + 1 + (vstart == std::string::npos ? 0 : vstart));
      e.factors = parser.parse_factors();
    }
    entries.emplace(key, std::move(e));
  }

  ChannelSpec spec;
  if (!entries.count("family")) throw ValidationError("channel spec has no 'family' key");
  {
    const Entry& e = entries.at("family");
    const Value& v = single(e, "family");
    if (v.kind != Value::Kind::Word) fail(e.line, v.column, "family: expected a name");
    spec.family = v.word;
    const auto names = builtin_families();
    if (std::find(names.begin(), names.end(), spec.family) == names.end())
      fail(e.line, v.column, "unknown family '" + spec.family + "'");
  }
  spec.name = entries.count("name") ? entries.at("name").raw : spec.family;

  auto only_for = [&](const std::string& key, bool allowed, const std::string& family_text) {
    if (entries.count(key) && !allowed)
      fail(entries.at(key).line, entries.at(key).column, "key '" + key + "' applies only to " + family_text);
  };
  const bool custom = spec.family == "custom-spectral";
  only_for("axis", spec.family == "rotation", "family rotation");
  only_for("f", spec.family == "example2", "family example2");
  only_for("g", spec.family == "example2", "family example2");
  for (const char* k : {"dim", "params", "p0", "basis"}) only_for(k, custom, "family custom-spectral");
  for (const auto& [key, e] : entries) {
    int index = 0;
    if ((is_indexed(key, "slope", index) || is_indexed(key, "generator", index)) && !custom)
      fail(e.line, e.column, "key '" + key + "' applies only to family custom-spectral");
  }
  only_for("input_state", !is_spectral_family(spec.family), "Kraus families (spectral families have no input)");

  if (entries.count("axis")) {
    const Entry& e = entries.at("axis");
    const Value& v = single(e, "axis");
    if (v.kind != Value::Kind::Word || v.word.size() != 1 || std::string("xyz").find(v.word[0]) == std::string::npos)
      fail(e.line, v.column, "axis: expected x, y or z");
    spec.options.axis = v.word[0];
  }
  for (const char* key : {"f", "g"}) {
    if (!entries.count(key)) continue;
    const Entry& e = entries.at(key);
    const auto coeffs = reals_of(single(e, key), e.line, key);
    if (coeffs.size() != 3) fail(e.line, e.factors.front().column, std::string(key) + ": expected [c0, c1, c2]");
    AffineCoefficients& target = std::string(key) == "f" ? spec.options.f : spec.options.g;
    std::copy(coeffs.begin(), coeffs.end(), target.begin());
  }
  if (entries.count("input_state")) {
    const Entry& e = entries.at("input_state");
    spec.input = complexes_of(single(e, "input_state"), e.line, "input_state");
  }
  if (entries.count("theta_domain")) {
    const Entry& e = entries.at("theta_domain");
    Domain d;
    for (const auto& factor : e.factors) {
      const auto bounds = reals_of(factor, e.line, "theta_domain");
      if (bounds.size() != 2) fail(e.line, factor.column, "theta_domain: expected [lo, hi]");
      if (!(bounds[0] < bounds[1])) fail(e.line, factor.column, "theta_domain: need lo < hi");
      d.lo.push_back(bounds[0]);
      d.hi.push_back(bounds[1]);
    }
    spec.domain = d;
  }

  if (custom) {
    CustomSpectral cs;
    auto integer = [&](const char* key) {
      if (!entries.count(key)) throw ValidationError(std::string("custom-spectral needs '") + key + "'");
      const Entry& e = entries.at(key);
      const double x = real_of(single(e, key), e.line, key);
      if (x != std::floor(x) || x < 1 || x > 64) fail(e.line, e.factors.front().column, std::string(key) + ": expected a small positive integer");
      return static_cast<int>(x);
    };
    cs.dim = integer("dim");
    cs.params = integer("params");
    if (!entries.count("p0")) throw ValidationError("custom-spectral needs 'p0'");
    {
      const Entry& e = entries.at("p0");
      const auto p0 = reals_of(single(e, "p0"), e.line, "p0");
      cs.p0 = Eigen::Map<const RealVector>(p0.data(), static_cast<Eigen::Index>(p0.size()));
    }
    for (int l = 1; l <= cs.params; ++l) {
      const std::string key = "slope" + std::to_string(l);
      if (!entries.count(key)) throw ValidationError("custom-spectral needs '" + key + "'");
      const Entry& e = entries.at(key);
      const auto s = reals_of(single(e, key.c_str()), e.line, key.c_str());
      cs.slopes.emplace_back(Eigen::Map<const RealVector>(s.data(), static_cast<Eigen::Index>(s.size())));
    }
    cs.basis = entries.count("basis") ? matrix_of(single(entries.at("basis"), "basis"), entries.at("basis").line, "basis")
                                      : ComplexMatrix::Identity(cs.dim, cs.dim);
    bool any_generator = false;
    for (int l = 1; l <= cs.params; ++l) any_generator |= entries.count("generator" + std::to_string(l)) > 0;
    if (any_generator) {
      for (int l = 1; l <= cs.params; ++l) {
        const std::string key = "generator" + std::to_string(l);
        if (!entries.count(key)) {
          cs.generators.push_back(ComplexMatrix::Zero(cs.dim, cs.dim));
          continue;
        }
        const Entry& e = entries.at(key);
        cs.generators.push_back(matrix_of(single(e, key.c_str()), e.line, key.c_str()));
      }
    }
    for (const auto& [key, e] : entries) {
      int index = 0;
      if ((is_indexed(key, "slope", index) || is_indexed(key, "generator", index)) && index > cs.params)
        fail(e.line, e.column, "key '" + key + "' exceeds params = " + std::to_string(cs.params));
    }
    spec.options.custom = std::move(cs);
  }
  return spec;
}

ChannelSpec load_channel_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open channel spec '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_channel_spec(buffer.str());
}

ParametricChannel build_channel(const ChannelSpec& spec) {
  ParametricChannel ch = builtin(spec.family, spec.options);
  if (spec.domain) {
    if (spec.domain->size() != ch.param_count()) {
      std::ostringstream msg;
      msg << "theta_domain has " << spec.domain->size() << " interval(s); family '" << spec.family << "' has "
          << ch.param_count() << " parameter(s)";
      throw ValidationError(msg.str());
    }
    ch = ch.with_domain(*spec.domain);
  }
  if (spec.input) {
    if (spec.input->size() != ch.dim()) {
      std::ostringstream msg;
      msg << "input_state has " << spec.input->size() << " amplitude(s); channel dimension is " << ch.dim();
      throw ValidationError(msg.str());
    }
    ch = ch.with_input(PureState(*spec.input));
  }
  for (const auto& point : ch.domain().probe_points()) ch.check_invariants(point);
  return ch;
}

std::string format_channel_spec(const ChannelSpec& spec) {
  std::ostringstream out;
  out << "name = " << spec.name << "\n";
  out << "family = " << spec.family << "\n";
  if (spec.domain) {
    out << "theta_domain = ";
    for (int l = 0; l < spec.domain->size(); ++l)
      out << (l ? " x " : "") << "[" << number_text(spec.domain->lo[static_cast<std::size_t>(l)]) << ", "
          << number_text(spec.domain->hi[static_cast<std::size_t>(l)]) << "]";
    out << "\n";
  }
  if (spec.input) out << "input_state = " << list_text(*spec.input) << "\n";
  if (spec.family == "rotation") out << "axis = " << spec.options.axis << "\n";
  if (spec.family == "example2") {
    out << "f = [" << number_text(spec.options.f[0]) << ", " << number_text(spec.options.f[1]) << ", "
        << number_text(spec.options.f[2]) << "]\n";
    out << "g = [" << number_text(spec.options.g[0]) << ", " << number_text(spec.options.g[1]) << ", "
        << number_text(spec.options.g[2]) << "]\n";
  }
  if (spec.options.custom && spec.family == "custom-spectral") {
    const CustomSpectral& cs = *spec.options.custom;
    out << "dim = " << cs.dim << "\nparams = " << cs.params << "\n";
    out << "p0 = " << list_text(cs.p0) << "\n";
    for (std::size_t l = 0; l < cs.slopes.size(); ++l) out << "slope" << l + 1 << " = " << list_text(cs.slopes[l]) << "\n";
    out << "basis = " << matrix_text(cs.basis) << "\n";
    for (std::size_t l = 0; l < cs.generators.size(); ++l)
      out << "generator" << l + 1 << " = " << matrix_text(cs.generators[l]) << "\n";
  }
  return out.str();
}

}  // namespace qfi
