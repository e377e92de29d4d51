#include "evfleet/milp/lp_format.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <fmt/format.h>

namespace evfleet::milp {
namespace {

constexpr std::string_view kSpecialChars = "!\"#$%&()/,.;?@_`'{}|~";
constexpr std::size_t kMaxLine = 200;

std::string Sanitize(const std::string& raw, std::string_view fallback_prefix, int index,
                     std::unordered_set<std::string>& used) {
  std::string s;
  for (char ch : raw) {
    const auto u = static_cast<unsigned char>(ch);
    s.push_back(std::isalnum(u) || kSpecialChars.find(ch) != std::string_view::npos ? ch : '_');
  }
  if (s.empty()) s = fmt::format("{}{}", fallback_prefix, index);
  // Names may not start with a digit or a period, and a leading e/E followed
  // by digits reads as an exponent in some parsers.
  const auto first = static_cast<unsigned char>(s.front());
  if (std::isdigit(first) || s.front() == '.' || s.front() == 'e' || s.front() == 'E') {
    s.insert(s.begin(), '_');
  }
  if (s.size() > 240) s.resize(240);
  std::string unique = s;
  for (int k = 1; used.count(unique) != 0; ++k) unique = fmt::format("{}_{}", s, k);
  used.insert(unique);
  return unique;
}

std::string Number(double v) { return fmt::format("{}", v); }

// Emits "name: +- c x +- c y" wrapping long lines.
void WriteExpression(std::ostream& out, const std::string& label,
                     const std::vector<std::pair<double, std::string>>& terms) {
  std::string line = fmt::format(" {}:", label);
  bool first = true;
  for (const auto& [coef, name] : terms) {
    std::string piece;
    if (first) {
      piece = coef < 0 ? fmt::format(" - {} {}", Number(-coef), name)
                       : fmt::format(" {} {}", Number(coef), name);
    } else {
      piece = fmt::format(" {} {} {}", coef < 0 ? '-' : '+', Number(std::abs(coef)), name);
    }
    first = false;
    if (line.size() + piece.size() > kMaxLine) {
      out << line << '\n';
      line.clear();
    }
    line += piece;
  }
  out << line;
}

}  // namespace

void WriteLp(const MilpModel& model, std::ostream& out) {
  model.Validate();
  std::unordered_set<std::string> used;
  std::vector<std::string> var_names;
  for (int j = 0; j < model.num_variables(); ++j) {
    var_names.push_back(Sanitize(model.variable(j).name, "x", j, used));
  }
  std::vector<std::string> row_names;
  for (int i = 0; i < model.num_constraints(); ++i) {
    row_names.push_back(Sanitize(model.constraint(i).name, "c", i, used));
  }
  const std::string obj_name = Sanitize("obj", "obj", 0, used);

  out << "\\ evfleet model\n";
  out << (model.objective_sense() == ObjectiveSense::kMaximize ? "Maximize\n" : "Minimize\n");
  std::vector<std::pair<double, std::string>> terms;
  for (int j = 0; j < model.num_variables(); ++j) {
    const double c = model.variable(j).objective;
    if (c != 0.0) terms.emplace_back(c, var_names[j]);
  }
  if (terms.empty() && model.num_variables() > 0) terms.emplace_back(0.0, var_names[0]);
  WriteExpression(out, obj_name, terms);
  out << '\n';

  out << "Subject To\n";
  for (int i = 0; i < model.num_constraints(); ++i) {
    const auto& r = model.constraint(i);
    terms.clear();
    for (const auto& t : r.terms) terms.emplace_back(t.coef, var_names[t.var]);
    if (terms.empty()) {
      // An empty row still has to mention a variable to be parseable.
      if (model.num_variables() == 0) continue;
      terms.emplace_back(0.0, var_names[0]);
    }
    WriteExpression(out, row_names[i], terms);
    const char* op = r.sense == RowSense::kLessEqual ? "<=" : r.sense == RowSense::kEqual ? "=" : ">=";
    out << ' ' << op << ' ' << Number(r.rhs) << '\n';
  }

  out << "Bounds\n";
  std::vector<std::string> binaries;
  std::vector<std::string> generals;
  for (int j = 0; j < model.num_variables(); ++j) {
    const auto& v = model.variable(j);
    const std::string& n = var_names[j];
    if (v.type == VarType::kBinary) {
      binaries.push_back(n);
      if (v.lower == v.upper) out << ' ' << n << " = " << Number(v.lower) << '\n';
      else if (v.lower > 0.0 || v.upper < 1.0) {
        out << ' ' << Number(v.lower) << " <= " << n << " <= " << Number(v.upper) << '\n';
      }
      continue;
    }
    if (v.type == VarType::kInteger) generals.push_back(n);
    const bool lo_inf = !std::isfinite(v.lower);
    const bool hi_inf = !std::isfinite(v.upper);
    if (lo_inf && hi_inf) {
      out << ' ' << n << " free\n";
    } else if (v.lower == v.upper) {
      out << ' ' << n << " = " << Number(v.lower) << '\n';
    } else if (lo_inf) {
      out << " -inf <= " << n << " <= " << Number(v.upper) << '\n';
    } else if (hi_inf) {
      if (v.lower != 0.0) out << ' ' << n << " >= " << Number(v.lower) << '\n';
    } else {
      out << ' ' << Number(v.lower) << " <= " << n << " <= " << Number(v.upper) << '\n';
    }
  }
  auto write_list = [&out](const char* header, const std::vector<std::string>& names) {
    if (names.empty()) return;
    out << header << '\n';
    std::string line;
    for (const auto& n : names) {
      if (line.size() + n.size() + 1 > kMaxLine) {
        out << line << '\n';
        line.clear();
      }
      line += ' ' + n;
    }
    out << line << '\n';
  };
  write_list("Binaries", binaries);
  write_list("Generals", generals);
  out << "End\n";
}

std::string ToLpString(const MilpModel& model) {
  std::ostringstream os;
  WriteLp(model, os);
  return os.str();
}

void ExportModel(const MilpModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ModelError(fmt::format("cannot write '{}'", path.string()));
  WriteLp(model, out);
}

}  // namespace evfleet::milp
