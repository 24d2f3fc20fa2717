#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace teleop {

inline constexpr double kJigsawsDt = 1.0 / 30.0;

/// Row-aligned MTM inputs (N x m) and PSM outputs (N x p).
struct TrajectorySet {
  double dt = kJigsawsDt;
  Eigen::MatrixXd inputs;
  Eigen::MatrixXd outputs;
  std::vector<std::string> input_names;
  std::vector<std::string> output_names;
  std::string trial_id;

  Eigen::Index samples() const { return outputs.rows(); }

  /// Shapes, name counts, N >= 1 and finiteness.
  void validate() const;

  bool operator==(const TrajectorySet&) const = default;
};

enum class Block { kMaster, kSlave };

struct LayoutColumn {
  std::size_t index = 0;  // 1-based column in the file
  std::string name;
  std::string unit;
  Block block = Block::kMaster;
};

/// Column descriptor for the whitespace-delimited kinematics format.
///
/// Text form, one column per line, `#` starts a comment:
///
///     <column> <name> <unit> <master|slave>
///
/// Columns must be numbered 1..N without gaps and names must be unique.
class ColumnLayout {
 public:
  static ColumnLayout parse(std::istream& in);
  static ColumnLayout load(const std::filesystem::path& path);
  /// The descriptor shipped with the sources.
  static ColumnLayout jigsaws();

  const std::vector<LayoutColumn>& columns() const { return columns_; }
  std::size_t size() const { return columns_.size(); }
  std::optional<std::size_t> find(std::string_view name) const;

 private:
  std::vector<LayoutColumn> columns_;
};

/// Parses kinematics rows. Master-block columns become inputs and
/// slave-block columns become outputs, both in file order.
TrajectorySet parse_kinematics(std::istream& in, const ColumnLayout& layout,
                               double dt = kJigsawsDt, std::string trial_id = {});

/// Reads a file; the trial id defaults to the file stem.
TrajectorySet load_kinematics(const std::filesystem::path& path,
                              const ColumnLayout& layout, double dt = kJigsawsDt);

/// Writes every channel into its layout column (matched by name) with
/// shortest round-trip formatting; columns without a channel are zero.
void write_kinematics(std::ostream& out, const TrajectorySet& ts,
                      const ColumnLayout& layout);

/// Column subset in the order given. A name is looked up among the inputs
/// first, then the outputs; repeating a name duplicates the column.
TrajectorySet select_channels(const TrajectorySet& ts,
                              const std::vector<std::string>& input_names,
                              const std::vector<std::string>& output_names);

/// "all" keeps everything; "paper" takes right MTM tool-tip position and
/// linear velocity as inputs and right PSM tool-tip x, y, z as outputs,
/// relabelled psm_x, psm_y, psm_z.
TrajectorySet select_preset(const TrajectorySet& ts, std::string_view preset);

struct ChannelSelection {
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::vector<std::string> output_labels;
};

ChannelSelection preset_selection(std::string_view preset);

}  // namespace teleop
