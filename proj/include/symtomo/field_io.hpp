#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "symtomo/errors.hpp"
#include "symtomo/grid.hpp"
#include "symtomo/marginal_field.hpp"
#include "symtomo/state_catalog.hpp"
#include "symtomo/tomography.hpp"

namespace symtomo {

// Field file layout:
//   #META {"schema_version":1,"field_kind":...,"grids":{...},...}
//   <csv header>
//   <rows, last axis fastest>
// Numbers use the shortest decimal that parses back to the same double.

inline constexpr int kFieldSchemaVersion = 1;

using AnyField = std::variant<WignerField, MarginalSlice, MarginalField, DensityMatrixGrid, CharacteristicGrid>;

struct FieldFile {
  nlohmann::json meta;
  AnyField field;
};

inline std::string_view field_kind(const AnyField& f) {
  static constexpr std::string_view names[] = {"wigner", "marginal_slice", "marginal_field", "density_matrix",
                                               "characteristic"};
  return names[f.index()];
}

namespace io_detail {

inline void put(std::string& line, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  line.append(buf, res.ptr);
}

inline nlohmann::json grid_json(const UniformGrid& g) {
  return {{"start", g.start()}, {"stop", g.stop()}, {"count", g.size()}};
}

inline UniformGrid grid_from(const nlohmann::json& meta, const char* name) {
  try {
    const auto& g = meta.at("grids").at(name);
    return UniformGrid(g.at("start").get<double>(), g.at("stop").get<double>(), g.at("count").get<std::size_t>());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("grid '") + name + "' missing or malformed in header: " + e.what(), 1);
  } catch (const GridError& e) {
    throw FormatError(std::string("grid '") + name + "': " + e.what(), 1);
  }
}

inline nlohmann::json diagnostics_json(const Diagnostics& d) {
  return {{"warnings", d.warnings}, {"metrics", d.metrics}};
}

inline Diagnostics diagnostics_from(const nlohmann::json& meta) {
  Diagnostics d;
  if (auto it = meta.find("diagnostics"); it != meta.end()) {
    d.warnings = it->value("warnings", std::vector<std::string>{});
    d.metrics = it->value("metrics", std::map<std::string, double>{});
  }
  return d;
}

class RowReader {
 public:
  RowReader(std::istream& in, std::size_t columns, long first_line) : in_(in), cols_(columns), line_no_(first_line) {}

  // Reads one data row into `out`; throws FormatError naming the line.
  void next(std::span<double> out) {
    ++line_no_;
    if (!std::getline(in_, line_)) throw FormatError("unexpected end of file: missing data rows", line_no_);
    if (!line_.empty() && line_.back() == '\r') line_.pop_back();
    const char* p = line_.data();
    const char* end = p + line_.size();
    for (std::size_t c = 0; c < cols_; ++c) {
      if (c > 0) {
        if (p == end || *p != ',') throw FormatError("expected " + std::to_string(cols_) + " columns", line_no_);
        ++p;
      }
      const auto res = std::from_chars(p, end, out[c]);
      if (res.ec != std::errc{}) throw FormatError("malformed number in column " + std::to_string(c + 1), line_no_);
      p = res.ptr;
    }
    if (p != end) throw FormatError("trailing characters after " + std::to_string(cols_) + " columns", line_no_);
  }

  void expect_coordinate(double got, double want, const char* axis) const {
    if (got != want) throw FormatError(std::string(axis) + " coordinate does not match header grid", line_no_);
  }

  void expect_end() {
    while (std::getline(in_, line_)) {
      ++line_no_;
      if (!line_.empty() && line_ != "\r") throw FormatError("more data rows than the header grids allow", line_no_);
    }
  }

 private:
  std::istream& in_;
  std::size_t cols_;
  long line_no_;
  std::string line_;
};

inline void emit(std::ostream& out, const std::string& line) { out.write(line.data(), static_cast<std::streamsize>(line.size())); }

}  // namespace io_detail

/// Writes `field` with its grids, diagnostics and the given provenance.
inline void write_field(std::ostream& out, const AnyField& field, const nlohmann::json& provenance = nlohmann::json::object()) {
  using io_detail::put;
  nlohmann::json meta{{"schema_version", kFieldSchemaVersion}, {"field_kind", field_kind(field)}, {"provenance", provenance}};
  std::string header;
  std::string line;
  line.reserve(128);

  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, WignerField>) {
          meta["grids"] = {{"q", io_detail::grid_json(f.q_grid)}, {"p", io_detail::grid_json(f.p_grid)}};
          meta["diagnostics"] = io_detail::diagnostics_json(f.diagnostics);
          header = "q,p,W";
        } else if constexpr (std::is_same_v<T, MarginalSlice>) {
          meta["grids"] = {{"X", io_detail::grid_json(f.x_grid)}};
          meta["params"] = {{"mu", f.params.mu}, {"nu", f.params.nu}, {"delta", f.params.delta}};
          meta["diagnostics"] = io_detail::diagnostics_json(f.diagnostics);
          header = "X,w";
        } else if constexpr (std::is_same_v<T, MarginalField>) {
          meta["grids"] = {{"mu", io_detail::grid_json(f.mu_grid())},
                           {"nu", io_detail::grid_json(f.nu_grid())},
                           {"X", io_detail::grid_json(f.x_grid())}};
          meta["rho_min"] = f.rho_min();
          auto unresolved = nlohmann::json::array();
          for (std::size_t i = 0; i < f.mu_grid().size(); ++i)
            for (std::size_t j = 0; j < f.nu_grid().size(); ++j)
              if (f.in_domain(i, j) && !f.valid(i, j)) unresolved.push_back({i, j});
          meta["unresolved"] = unresolved;
          meta["diagnostics"] = io_detail::diagnostics_json(f.diagnostics);
          header = "mu,nu,X,w";
        } else if constexpr (std::is_same_v<T, DensityMatrixGrid>) {
          meta["grids"] = {{"q", io_detail::grid_json(f.q_grid)}};
          meta["config"] = {{"s", f.config.s},
                            {"mu_range", f.config.mu_range},
                            {"mu_samples", f.config.mu_samples},
                            {"y_range", f.config.y_range},
                            {"y_samples", f.config.y_samples},
                            {"ray_radius", f.config.ray_radius}};
          meta["diagnostics"] = io_detail::diagnostics_json(f.diagnostics);
          header = "q,qp,re_rho,im_rho";
        } else {
          meta["grids"] = {{"a", io_detail::grid_json(f.a_grid)}, {"b", io_detail::grid_json(f.b_grid)}};
          meta["diagnostics"] = io_detail::diagnostics_json(f.diagnostics);
          header = "a,b,re_chi,im_chi";
        }
      },
      field);

  out << "#META " << meta.dump() << '\n' << header << '\n';

  auto row = [&](std::initializer_list<double> vals) {
    line.clear();
    bool first = true;
    for (double v : vals) {
      if (!first) line.push_back(',');
      first = false;
      put(line, v);
    }
    line.push_back('\n');
    io_detail::emit(out, line);
  };

  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, WignerField>) {
          for (std::size_t i = 0; i < f.q_grid.size(); ++i)
            for (std::size_t j = 0; j < f.p_grid.size(); ++j)
              row({f.q_grid[i], f.p_grid[j], f.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))});
        } else if constexpr (std::is_same_v<T, MarginalSlice>) {
          for (std::size_t k = 0; k < f.x_grid.size(); ++k) row({f.x_grid[k], f.values[k]});
        } else if constexpr (std::is_same_v<T, MarginalField>) {
          for (std::size_t i = 0; i < f.mu_grid().size(); ++i)
            for (std::size_t j = 0; j < f.nu_grid().size(); ++j)
              for (std::size_t k = 0; k < f.x_grid().size(); ++k)
                row({f.mu_grid()[i], f.nu_grid()[j], f.x_grid()[k], f.at(i, j, k)});
        } else if constexpr (std::is_same_v<T, DensityMatrixGrid>) {
          for (std::size_t i = 0; i < f.q_grid.size(); ++i)
            for (std::size_t j = 0; j < f.q_grid.size(); ++j) {
              const cdouble v = f.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
              row({f.q_grid[i], f.q_grid[j], v.real(), v.imag()});
            }
        } else {
          for (std::size_t i = 0; i < f.a_grid.size(); ++i)
            for (std::size_t j = 0; j < f.b_grid.size(); ++j) {
              const cdouble v = f.at(i, j);
              row({f.a_grid[i], f.b_grid[j], v.real(), v.imag()});
            }
        }
      },
      field);
  if (!out) throw Error("write_field: stream error");
}

inline FieldFile read_field(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty file", 1);
  constexpr std::string_view tag = "#META ";
  if (line.rfind(tag, 0) != 0) throw FormatError("first line must start with '#META '", 1);
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(line.substr(tag.size()));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("header is not valid JSON: ") + e.what(), 1);
  }
  if (!meta.contains("schema_version") || !meta["schema_version"].is_number_integer() ||
      meta["schema_version"].get<int>() != kFieldSchemaVersion)
    throw FormatError("unsupported schema_version (expected " + std::to_string(kFieldSchemaVersion) + ")", 1);
  const std::string kind = meta.value("field_kind", "");

  if (!std::getline(in, line)) throw FormatError("missing CSV header row", 2);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto expect_header = [&](std::string_view want) {
    if (line != want) throw FormatError("CSV header '" + line + "' does not match field kind (expected '" + std::string(want) + "')", 2);
  };

  const Diagnostics diag = io_detail::diagnostics_from(meta);
  double r[4];
  if (kind == "wigner") {
    expect_header("q,p,W");
    const auto qg = io_detail::grid_from(meta, "q"), pg = io_detail::grid_from(meta, "p");
    WignerField f{qg, pg, Eigen::MatrixXd(qg.size(), pg.size()), diag};
    io_detail::RowReader rd(in, 3, 2);
    for (std::size_t i = 0; i < qg.size(); ++i)
      for (std::size_t j = 0; j < pg.size(); ++j) {
        rd.next({r, 3});
        rd.expect_coordinate(r[0], qg[i], "q");
        rd.expect_coordinate(r[1], pg[j], "p");
        f.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = r[2];
      }
    rd.expect_end();
    return {meta, std::move(f)};
  }
  if (kind == "marginal_slice") {
    expect_header("X,w");
    const auto xg = io_detail::grid_from(meta, "X");
    TomographyParams m;
    try {
      const auto& pj = meta.at("params");
      m = {pj.at("mu").get<double>(), pj.at("nu").get<double>(), pj.at("delta").get<double>()};
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("marginal_slice header lacks params: ") + e.what(), 1);
    }
    MarginalSlice f{m, xg, std::vector<double>(xg.size()), diag};
    io_detail::RowReader rd(in, 2, 2);
    for (std::size_t k = 0; k < xg.size(); ++k) {
      rd.next({r, 2});
      rd.expect_coordinate(r[0], xg[k], "X");
      f.values[k] = r[1];
    }
    rd.expect_end();
    return {meta, std::move(f)};
  }
  if (kind == "marginal_field") {
    expect_header("mu,nu,X,w");
    FieldGrid g{io_detail::grid_from(meta, "mu"), io_detail::grid_from(meta, "nu"), io_detail::grid_from(meta, "X"),
                meta.value("rho_min", 0.0)};
    MarginalField f = [&] {
      try {
        return MarginalField(g);
      } catch (const GridError& e) {
        throw FormatError(std::string("marginal_field geometry: ") + e.what(), 1);
      }
    }();
    f.diagnostics = diag;
    if (auto it = meta.find("unresolved"); it != meta.end())
      for (const auto& ij : *it) {
        const auto i = ij.at(0).get<std::size_t>(), j = ij.at(1).get<std::size_t>();
        if (i >= g.mu.size() || j >= g.nu.size()) throw FormatError("unresolved cell index out of range", 1);
        f.set_resolved(i, j, false);
      }
    io_detail::RowReader rd(in, 4, 2);
    for (std::size_t i = 0; i < g.mu.size(); ++i)
      for (std::size_t j = 0; j < g.nu.size(); ++j) {
        auto s = f.slice(i, j);
        for (std::size_t k = 0; k < g.x.size(); ++k) {
          rd.next({r, 4});
          rd.expect_coordinate(r[0], g.mu[i], "mu");
          rd.expect_coordinate(r[1], g.nu[j], "nu");
          rd.expect_coordinate(r[2], g.x[k], "X");
          s[k] = r[3];
        }
      }
    rd.expect_end();
    return {meta, std::move(f)};
  }
  if (kind == "density_matrix") {
    expect_header("q,qp,re_rho,im_rho");
    const auto qg = io_detail::grid_from(meta, "q");
    ReconstructionConfig cfg;
    if (auto it = meta.find("config"); it != meta.end()) {
      cfg.s = it->value("s", cfg.s);
      cfg.mu_range = it->value("mu_range", cfg.mu_range);
      cfg.mu_samples = it->value("mu_samples", cfg.mu_samples);
      cfg.y_range = it->value("y_range", cfg.y_range);
      cfg.y_samples = it->value("y_samples", cfg.y_samples);
      cfg.ray_radius = it->value("ray_radius", cfg.ray_radius);
    }
    DensityMatrixGrid f{qg, Eigen::MatrixXcd(qg.size(), qg.size()), cfg, diag};
    io_detail::RowReader rd(in, 4, 2);
    for (std::size_t i = 0; i < qg.size(); ++i)
      for (std::size_t j = 0; j < qg.size(); ++j) {
        rd.next({r, 4});
        rd.expect_coordinate(r[0], qg[i], "q");
        rd.expect_coordinate(r[1], qg[j], "qp");
        f.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = {r[2], r[3]};
      }
    rd.expect_end();
    return {meta, std::move(f)};
  }
  if (kind == "characteristic") {
    expect_header("a,b,re_chi,im_chi");
    const auto ag = io_detail::grid_from(meta, "a"), bg = io_detail::grid_from(meta, "b");
    CharacteristicGrid f{ag, bg, Eigen::MatrixXcd(ag.size(), bg.size()), diag};
    io_detail::RowReader rd(in, 4, 2);
    for (std::size_t i = 0; i < ag.size(); ++i)
      for (std::size_t j = 0; j < bg.size(); ++j) {
        rd.next({r, 4});
        rd.expect_coordinate(r[0], ag[i], "a");
        rd.expect_coordinate(r[1], bg[j], "b");
        f.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = {r[2], r[3]};
      }
    rd.expect_end();
    return {meta, std::move(f)};
  }
  throw FormatError("unknown field_kind '" + kind + "'", 1);
}

inline void write_field_file(const std::string& path, const AnyField& field,
                             const nlohmann::json& provenance = nlohmann::json::object()) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  write_field(out, field, provenance);
}

inline FieldFile read_field_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  return read_field(in);
}

}  // namespace symtomo
