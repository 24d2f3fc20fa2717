#include "teleop/trajectory.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "teleop/errors.hpp"

namespace teleop {
namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

std::string join(const std::vector<std::string>& names) {
  std::string out;
  for (const auto& n : names) {
    if (!out.empty()) out += ", ";
    out += n;
  }
  return out;
}

void append_number(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

}  // namespace

void TrajectorySet::validate() const {
  if (outputs.rows() < 1) throw ContractViolation("trajectory has no samples");
  if (inputs.rows() != outputs.rows()) {
    throw ContractViolation("inputs and outputs are not row-aligned (" +
                            std::to_string(inputs.rows()) + " vs " +
                            std::to_string(outputs.rows()) + " rows)");
  }
  if (static_cast<Eigen::Index>(input_names.size()) != inputs.cols() ||
      static_cast<Eigen::Index>(output_names.size()) != outputs.cols()) {
    throw ContractViolation("channel name count does not match channel count");
  }
  if (!inputs.allFinite() || !outputs.allFinite()) {
    throw ContractViolation("trajectory contains non-finite values");
  }
  if (!(dt > 0.0)) throw ContractViolation("trajectory dt must be positive");
}

ColumnLayout ColumnLayout::parse(std::istream& in) {
  ColumnLayout layout;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    if (tokens.size() != 4) {
      throw FormatError("layout row " + std::to_string(row) +
                            ": expected '<column> <name> <unit> <block>'",
                        row);
    }
    LayoutColumn col;
    const auto res = std::from_chars(tokens[0].data(), tokens[0].data() + tokens[0].size(),
                                     col.index);
    if (res.ec != std::errc() || res.ptr != tokens[0].data() + tokens[0].size()) {
      throw ParseError("layout row " + std::to_string(row) + ": bad column index", row, 1);
    }
    if (col.index != layout.columns_.size() + 1) {
      throw FormatError("layout row " + std::to_string(row) + ": column " +
                            std::to_string(col.index) + " out of sequence",
                        row, 1);
    }
    col.name = tokens[1];
    col.unit = tokens[2];
    if (tokens[3] == "master") {
      col.block = Block::kMaster;
    } else if (tokens[3] == "slave") {
      col.block = Block::kSlave;
    } else {
      throw FormatError("layout row " + std::to_string(row) + ": unknown block '" +
                            std::string(tokens[3]) + "'",
                        row, 4);
    }
    if (!seen.insert(col.name).second) {
      throw FormatError("layout row " + std::to_string(row) + ": duplicate name " + col.name,
                        row, 2);
    }
    layout.columns_.push_back(std::move(col));
  }
  if (layout.columns_.empty()) throw ContractViolation("column layout is empty");
  return layout;
}

ColumnLayout ColumnLayout::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ContractViolation("cannot open layout file " + path.string());
  return parse(in);
}

ColumnLayout ColumnLayout::jigsaws() { return load(TELEOP_LAYOUT_FILE); }

std::optional<std::size_t> ColumnLayout::find(std::string_view name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].name == name) return i;
  }
  return std::nullopt;
}

TrajectorySet parse_kinematics(std::istream& in, const ColumnLayout& layout, double dt,
                               std::string trial_id) {
  if (!(dt > 0.0)) throw ContractViolation("dt must be positive");
  const std::size_t width = layout.size();
  std::vector<double> values;
  std::vector<std::size_t> non_finite_rows;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    if (tokens.size() != width) {
      throw FormatError("row " + std::to_string(line_no) + " has " +
                            std::to_string(tokens.size()) + " columns, expected " +
                            std::to_string(width),
                        line_no);
    }
    bool finite = true;
    for (std::size_t c = 0; c < width; ++c) {
      double v = 0.0;
      const auto tok = tokens[c];
      const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
        throw ParseError("row " + std::to_string(line_no) + ", column " +
                             std::to_string(c + 1) + ": '" + std::string(tok) +
                             "' is not a number",
                         line_no, c + 1);
      }
      finite = finite && std::isfinite(v);
      values.push_back(v);
    }
    if (!finite) non_finite_rows.push_back(line_no);
    ++rows;
  }
  if (!non_finite_rows.empty()) {
    std::ostringstream os;
    os << "non-finite values on rows";
    for (auto r : non_finite_rows) os << ' ' << r;
    throw ParseError(os.str(), non_finite_rows.front());
  }
  if (rows == 0) throw ContractViolation("kinematics input is empty");

  std::vector<std::size_t> master, slave;
  TrajectorySet ts;
  ts.dt = dt;
  ts.trial_id = std::move(trial_id);
  for (std::size_t c = 0; c < width; ++c) {
    const auto& col = layout.columns()[c];
    if (col.block == Block::kMaster) {
      master.push_back(c);
      ts.input_names.push_back(col.name);
    } else {
      slave.push_back(c);
      ts.output_names.push_back(col.name);
    }
  }
  const auto n = static_cast<Eigen::Index>(rows);
  ts.inputs.resize(n, static_cast<Eigen::Index>(master.size()));
  ts.outputs.resize(n, static_cast<Eigen::Index>(slave.size()));
  for (Eigen::Index r = 0; r < n; ++r) {
    const double* row = values.data() + static_cast<std::size_t>(r) * width;
    for (std::size_t j = 0; j < master.size(); ++j) ts.inputs(r, j) = row[master[j]];
    for (std::size_t j = 0; j < slave.size(); ++j) ts.outputs(r, j) = row[slave[j]];
  }
  return ts;
}

TrajectorySet load_kinematics(const std::filesystem::path& path,
                              const ColumnLayout& layout, double dt) {
  std::ifstream in(path);
  if (!in) throw ContractViolation("cannot open kinematics file " + path.string());
  try {
    return parse_kinematics(in, layout, dt, path.stem().string());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.row(), e.column());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what(), e.row(), e.column());
  }
}

void write_kinematics(std::ostream& out, const TrajectorySet& ts,
                      const ColumnLayout& layout) {
  ts.validate();
  std::vector<int> source_input(layout.size(), -1), source_output(layout.size(), -1);
  auto place = [&](const std::string& name, std::vector<int>& slot, int j) {
    const auto col = layout.find(name);
    if (!col) throw LookupError("channel '" + name + "' has no column in the layout");
    slot[*col] = j;
  };
  for (std::size_t j = 0; j < ts.input_names.size(); ++j) {
    place(ts.input_names[j], source_input, static_cast<int>(j));
  }
  for (std::size_t j = 0; j < ts.output_names.size(); ++j) {
    place(ts.output_names[j], source_output, static_cast<int>(j));
  }
  std::string line;
  for (Eigen::Index r = 0; r < ts.samples(); ++r) {
    line.clear();
    for (std::size_t c = 0; c < layout.size(); ++c) {
      if (c) line += ' ';
      double v = 0.0;
      if (source_input[c] >= 0) {
        v = ts.inputs(r, source_input[c]);
      } else if (source_output[c] >= 0) {
        v = ts.outputs(r, source_output[c]);
      }
      append_number(line, v);
    }
    line += '\n';
    out << line;
  }
}

TrajectorySet select_channels(const TrajectorySet& ts,
                              const std::vector<std::string>& input_names,
                              const std::vector<std::string>& output_names) {
  auto column_of = [&](const std::string& name) -> Eigen::VectorXd {
    for (std::size_t j = 0; j < ts.input_names.size(); ++j) {
      if (ts.input_names[j] == name) return ts.inputs.col(static_cast<Eigen::Index>(j));
    }
    for (std::size_t j = 0; j < ts.output_names.size(); ++j) {
      if (ts.output_names[j] == name) return ts.outputs.col(static_cast<Eigen::Index>(j));
    }
    throw LookupError("unknown channel '" + name + "'; available: inputs [" +
                      join(ts.input_names) + "], outputs [" + join(ts.output_names) + "]");
  };

  TrajectorySet out;
  out.dt = ts.dt;
  out.trial_id = ts.trial_id;
  out.input_names = input_names;
  out.output_names = output_names;
  out.inputs.resize(ts.samples(), static_cast<Eigen::Index>(input_names.size()));
  out.outputs.resize(ts.samples(), static_cast<Eigen::Index>(output_names.size()));
  for (std::size_t j = 0; j < input_names.size(); ++j) {
    out.inputs.col(static_cast<Eigen::Index>(j)) = column_of(input_names[j]);
  }
  for (std::size_t j = 0; j < output_names.size(); ++j) {
    out.outputs.col(static_cast<Eigen::Index>(j)) = column_of(output_names[j]);
  }
  return out;
}

ChannelSelection preset_selection(std::string_view preset) {
  if (preset == "paper") {
    return {{"mtmr_pos_x", "mtmr_pos_y", "mtmr_pos_z", "mtmr_vel_x", "mtmr_vel_y",
             "mtmr_vel_z"},
            {"psmr_pos_x", "psmr_pos_y", "psmr_pos_z"},
            {"psm_x", "psm_y", "psm_z"}};
  }
  throw LookupError("unknown channel preset '" + std::string(preset) +
                    "'; available: all, paper");
}

TrajectorySet select_preset(const TrajectorySet& ts, std::string_view preset) {
  if (preset == "all") return ts;
  const ChannelSelection sel = preset_selection(preset);
  TrajectorySet out = select_channels(ts, sel.inputs, sel.outputs);
  out.output_names = sel.output_labels;
  return out;
}

}  // namespace teleop
