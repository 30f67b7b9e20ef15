#include "consol/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>

namespace consol {

using nlohmann::json;

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + ": " + std::strerror(errno));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string() + ": " + std::strerror(errno));
  out << contents;
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw IoError("cannot create directory " + dir.string() + (ec ? ": " + ec.message() : ""));
  }
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{}", v);
}

namespace {

json axis_json(const AxisMap& m) { return json{{"offset", m.offset}, {"scale", m.scale}}; }

AxisMap axis_from_json(const json& j) {
  AxisMap m{j.at("offset").get<double>(), j.at("scale").get<double>()};
  if (!(m.scale != 0.0) || !std::isfinite(m.scale) || !std::isfinite(m.offset)) {
    throw std::invalid_argument("scaling entries must be finite with nonzero scale");
  }
  return m;
}

double parse_number(const std::string& field) {
  if (field == "nan") return std::nan("");
  if (field == "inf") return HUGE_VAL;
  if (field == "-inf") return -HUGE_VAL;
  std::size_t used = 0;
  const double v = std::stod(field, &used);
  if (used != field.size()) throw std::invalid_argument("bad number '" + field + "'");
  return v;
}

std::vector<std::vector<double>> parse_table(const std::string& text, const std::string& header,
                                             std::size_t columns) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != header) throw std::invalid_argument("expected header '" + header + "'");
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) row.push_back(parse_number(field));
    if (row.size() != columns) throw std::invalid_argument("row with " + std::to_string(row.size()) + " fields");
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

json model_to_json(const Model& model) {
  json params = json::array();
  for (double v : model.params.flat()) params.push_back(v);
  return json{{"format", kModelFormat},
              {"version", kModelVersion},
              {"activation", model.activation},
              {"layer_sizes", model.params.layer_sizes()},
              {"parameters", params},
              {"scaling",
               {{"x", axis_json(model.scaling.x)},
                {"z", axis_json(model.scaling.z)},
                {"t", axis_json(model.scaling.t)},
                {"u", axis_json(model.scaling.u)}}},
              {"domain",
               {{"x_min", model.x_min},
                {"x_max", model.x_max},
                {"z_min", model.z_min},
                {"z_max", model.z_max},
                {"t0", model.t0},
                {"t1", model.t1}}}};
}

Model model_from_json(const json& doc) {
  try {
    if (doc.at("format").get<std::string>() != kModelFormat) throw std::invalid_argument("not a model document");
    if (doc.at("version").get<int>() != kModelVersion) throw std::invalid_argument("unsupported model version");
    const std::string activation = doc.at("activation").get<std::string>();
    if (activation != kActivationTanh) throw std::invalid_argument("unsupported activation '" + activation + "'");
    Model m{NetworkParams(doc.at("layer_sizes").get<std::vector<int>>(),
                          doc.at("parameters").get<std::vector<double>>()),
            Scaling{}, activation};
    const json& s = doc.at("scaling");
    m.scaling = Scaling{axis_from_json(s.at("x")), axis_from_json(s.at("z")), axis_from_json(s.at("t")),
                        axis_from_json(s.at("u"))};
    const json& d = doc.at("domain");
    m.x_min = d.at("x_min").get<double>();
    m.x_max = d.at("x_max").get<double>();
    m.z_min = d.at("z_min").get<double>();
    m.z_max = d.at("z_max").get<double>();
    m.t0 = d.at("t0").get<double>();
    m.t1 = d.at("t1").get<double>();
    return m;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed model document: ") + e.what());
  }
}

void write_model(const std::filesystem::path& path, const Model& model) {
  write_text_file(path, model_to_json(model).dump(1) + "\n");
}

Model read_model(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
  return model_from_json(doc);
}

std::string history_csv(const TrainHistory& history) {
  std::string out = std::string(kHistoryHeader) + "\n";
  for (const HistoryRecord& r : history.records) {
    out += fmt::format("{},{},{},{},{},{}\n", r.epoch, format_double(r.loss.mse_f), format_double(r.loss.mse_b),
                       format_double(r.loss.mse_u), format_double(r.loss.total), format_double(r.test_metric));
  }
  return out;
}

TrainHistory parse_history_csv(const std::string& text) {
  TrainHistory h;
  for (const auto& row : parse_table(text, kHistoryHeader, 6)) {
    h.records.push_back({static_cast<int>(row[0]), LossBreakdown{row[1], row[2], row[3], row[4]}, row[5]});
  }
  return h;
}

std::string grid_csv(const FieldGrid& grid) {
  std::string out = std::string(kGridHeader) + "\n";
  const std::string t = format_double(grid.t);
  for (std::size_t j = 0; j < grid.z.size(); ++j) {
    for (std::size_t i = 0; i < grid.x.size(); ++i) {
      out += fmt::format("{},{},{},{}\n", format_double(grid.x[i]), format_double(grid.z[j]), t,
                         format_double(grid.u(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i))));
    }
  }
  return out;
}

FieldGrid parse_grid_csv(const std::string& text) {
  const auto rows = parse_table(text, kGridHeader, 4);
  if (rows.empty()) throw std::invalid_argument("grid table is empty");
  FieldGrid g;
  g.t = rows.front()[2];
  for (const auto& r : rows) {
    if (g.z.empty() || r[1] != g.z.back()) {
      if (!g.z.empty() && !(r[1] > g.z.back())) throw std::invalid_argument("grid rows must be z-outer ascending");
      g.z.push_back(r[1]);
    }
    if (g.z.size() == 1) g.x.push_back(r[0]);
  }
  if (rows.size() != g.x.size() * g.z.size()) throw std::invalid_argument("grid table is not rectangular");
  g.u.resize(static_cast<Eigen::Index>(g.z.size()), static_cast<Eigen::Index>(g.x.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const std::size_t j = k / g.x.size();
    const std::size_t i = k % g.x.size();
    if (rows[k][0] != g.x[i] || rows[k][1] != g.z[j]) throw std::invalid_argument("grid table is not rectangular");
    g.u(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = rows[k][3];
  }
  return g;
}

json to_json(const LossBreakdown& loss) {
  return json{{"mse_f", loss.mse_f}, {"mse_b", loss.mse_b}, {"mse_u", loss.mse_u}, {"total", loss.total}};
}

}  // namespace consol
