#include "teleop/trajectory.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "teleop/errors.hpp"
#include "teleop/synthetic.hpp"

namespace teleop {
namespace {

std::string rows_of(std::size_t rows, std::size_t cols, const std::string& value = "0") {
  std::string text;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) text += (c ? " " : "") + value;
    text += '\n';
  }
  return text;
}

TrajectorySet parse(const std::string& text) {
  std::istringstream in(text);
  return parse_kinematics(in, ColumnLayout::jigsaws());
}

TEST(ColumnLayout, ShippedLayoutHas76Columns) {
  const auto layout = ColumnLayout::jigsaws();
  ASSERT_EQ(layout.size(), 76u);
  std::size_t master = 0;
  for (const auto& c : layout.columns()) master += c.block == Block::kMaster;
  EXPECT_EQ(master, 38u);
  EXPECT_EQ(layout.columns().front().name, "mtml_pos_x");
  EXPECT_EQ(layout.columns().back().name, "psmr_gripper");
  ASSERT_TRUE(layout.find("psmr_pos_x"));
  EXPECT_FALSE(layout.find("nope"));
}

TEST(ColumnLayout, RejectsGapsAndDuplicates) {
  std::istringstream gap("1 a m master\n3 b m slave\n");
  EXPECT_THROW(ColumnLayout::parse(gap), FormatError);
  std::istringstream dup("1 a m master\n2 a m slave\n");
  EXPECT_THROW(ColumnLayout::parse(dup), FormatError);
  std::istringstream block("1 a m elsewhere\n");
  EXPECT_THROW(ColumnLayout::parse(block), FormatError);
  std::istringstream ok("# comment\n1 a m master\n2 b m slave\n");
  EXPECT_EQ(ColumnLayout::parse(ok).size(), 2u);
}

TEST(ParseKinematics, ZerosFile) {
  const auto ts = parse(rows_of(100, 76));
  EXPECT_EQ(ts.samples(), 100);
  EXPECT_EQ(ts.inputs.cols(), 38);
  EXPECT_EQ(ts.outputs.cols(), 38);
  EXPECT_TRUE(ts.inputs.isZero());
  EXPECT_TRUE(ts.outputs.isZero());
  EXPECT_DOUBLE_EQ(ts.dt, 1.0 / 30.0);
}

TEST(ParseKinematics, WrongColumnCountReportsRow) {
  const std::string text = rows_of(1, 76) + rows_of(1, 75);
  try {
    parse(text);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.row(), 2u);
    EXPECT_NE(std::string(e.what()).find("75"), std::string::npos);
  }
}

TEST(ParseKinematics, BadTokenReportsRowAndColumn) {
  std::string line = rows_of(1, 76);
  line.replace(line.find('0', 6), 1, "x1");  // column 4
  try {
    parse(rows_of(2, 76) + line);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.row(), 3u);
    EXPECT_EQ(e.column(), 4u);
  }
}

TEST(ParseKinematics, NonFiniteRowsAreAllReported) {
  std::string text = rows_of(1, 76) + rows_of(1, 76, "nan") + rows_of(1, 76) +
                     rows_of(1, 76, "inf");
  try {
    parse(text);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.row(), 2u);
    const std::string msg = e.what();
    EXPECT_NE(msg.find(" 2"), std::string::npos);
    EXPECT_NE(msg.find(" 4"), std::string::npos);
  }
}

TEST(ParseKinematics, EmptyInputIsContractViolation) {
  EXPECT_THROW(parse(""), ContractViolation);
  EXPECT_THROW(parse("\n   \n"), ContractViolation);
}

TEST(ParseKinematics, BlankLinesSkipped) {
  EXPECT_EQ(parse(rows_of(2, 76) + "\n" + rows_of(1, 76)).samples(), 3);
}

TEST(LoadKinematics, MissingFileAndTrialId) {
  EXPECT_THROW(load_kinematics("/nonexistent/trial.txt", ColumnLayout::jigsaws()),
               ContractViolation);
  const std::filesystem::path dir = TELEOP_TEST_TMP;
  std::filesystem::create_directories(dir);
  const auto path = dir / "Suturing_B001.txt";
  std::ofstream(path) << rows_of(3, 76, "1.5");
  const auto ts = load_kinematics(path, ColumnLayout::jigsaws());
  EXPECT_EQ(ts.trial_id, "Suturing_B001");
  EXPECT_EQ(ts.outputs(2, 37), 1.5);
}

TEST(WriteKinematics, RoundTripIsExact) {
  SyntheticSpec spec;
  spec.generator = mimo2_generator();
  spec.samples = 200;
  spec.seed = 5;
  spec.measurement_noise_std = 0.01;
  spec.process_noise_std = 0.001;
  const auto ts = gen_synthetic(spec);
  const auto layout = ColumnLayout::jigsaws();
  std::ostringstream out;
  write_kinematics(out, ts, layout);
  std::istringstream in(out.str());
  const auto back = parse_kinematics(in, layout, ts.dt, ts.trial_id);
  const auto sel = select_channels(back, ts.input_names, ts.output_names);
  EXPECT_EQ(sel.inputs, ts.inputs);
  EXPECT_EQ(sel.outputs, ts.outputs);
}

TEST(SelectChannels, OrderDuplicatesAndErrors) {
  auto ts = parse(rows_of(4, 76));
  ts.inputs.col(0).setConstant(1.0);   // mtml_pos_x
  ts.outputs.col(1).setConstant(2.0);  // psml_pos_y
  const auto sel = select_channels(ts, {"mtml_pos_x", "psml_pos_y", "mtml_pos_x"},
                                   {"psml_pos_y"});
  ASSERT_EQ(sel.inputs.cols(), 3);
  EXPECT_EQ(sel.inputs(0, 0), 1.0);
  EXPECT_EQ(sel.inputs(0, 1), 2.0);
  EXPECT_EQ(sel.inputs(0, 2), 1.0);
  EXPECT_EQ(sel.outputs(3, 0), 2.0);
  EXPECT_EQ(sel.input_names[2], "mtml_pos_x");
  try {
    select_channels(ts, {"bogus"}, {});
    FAIL() << "expected LookupError";
  } catch (const LookupError& e) {
    EXPECT_NE(std::string(e.what()).find("psmr_pos_x"), std::string::npos);
  }
}

TEST(SelectPreset, PaperSelection) {
  const auto ts = parse(rows_of(5, 76));
  const auto paper = select_preset(ts, "paper");
  EXPECT_EQ(paper.inputs.cols(), 6);
  EXPECT_EQ(paper.outputs.cols(), 3);
  EXPECT_EQ(paper.output_names, (std::vector<std::string>{"psm_x", "psm_y", "psm_z"}));
  EXPECT_EQ(paper.input_names.front(), "mtmr_pos_x");
  EXPECT_EQ(select_preset(ts, "all"), ts);
  EXPECT_THROW(select_preset(ts, "left"), LookupError);
}

TEST(TrajectorySet, ValidateChecksShapes) {
  TrajectorySet ts;
  ts.inputs = Eigen::MatrixXd::Zero(3, 1);
  ts.outputs = Eigen::MatrixXd::Zero(2, 1);
  ts.input_names = {"u"};
  ts.output_names = {"y"};
  EXPECT_THROW(ts.validate(), ContractViolation);
  ts.outputs = Eigen::MatrixXd::Zero(3, 1);
  EXPECT_NO_THROW(ts.validate());
  ts.outputs(1, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(ts.validate(), ContractViolation);
}

TEST(GenSynthetic, DeterministicAndSeedSensitive) {
  SyntheticSpec spec;
  spec.generator = mimo2_generator();
  spec.samples = 300;
  spec.seed = 11;
  spec.process_noise_std = 0.01;
  spec.measurement_noise_std = 0.01;
  const auto a = gen_synthetic(spec);
  EXPECT_EQ(a, gen_synthetic(spec));
  spec.seed = 12;
  EXPECT_NE(a.outputs, gen_synthetic(spec).outputs);
  EXPECT_EQ(a.input_names.size(), 6u);
  EXPECT_EQ(a.output_names.front(), "psmr_pos_x");
}

TEST(GenSynthetic, ZeroExcitationAndNoiseGivesZeros) {
  SyntheticSpec spec;
  spec.generator = mimo2_generator();
  spec.samples = 50;
  spec.input_amplitude = 0.0;
  const auto ts = gen_synthetic(spec);
  EXPECT_TRUE(ts.inputs.isZero());
  EXPECT_TRUE(ts.outputs.isZero());
}

TEST(GenSynthetic, UnstableGeneratorRejectedUnlessAllowed) {
  ArxModel m;
  m.orders = {1, 1, 1};
  m.a = {Eigen::VectorXd::Constant(1, 1.05)};
  m.b = {Eigen::MatrixXd::Ones(1, 1)};
  SyntheticSpec spec;
  spec.generator = m;
  spec.samples = 20;
  EXPECT_THROW(gen_synthetic(spec), ContractViolation);
  spec.allow_unstable = true;
  EXPECT_EQ(gen_synthetic(spec).samples(), 20);
}

TEST(GenSynthetic, StateSpaceGeneratorMatchesNoiseFreeRecursion) {
  SystemModel m;
  m.a = Eigen::MatrixXd::Constant(1, 1, 0.8);
  m.b = Eigen::MatrixXd::Constant(1, 1, 0.5);
  m.h = Eigen::MatrixXd::Constant(1, 1, 2.0);
  m.q = Eigen::MatrixXd::Zero(1, 1);
  m.r = Eigen::MatrixXd::Zero(1, 1);
  SyntheticSpec spec;
  spec.generator = m;
  spec.samples = 40;
  spec.seed = 3;
  const auto ts = gen_synthetic(spec);
  double x = 0.0;
  for (Eigen::Index k = 0; k < 40; ++k) {
    if (k > 0) x = 0.8 * x + 0.5 * ts.inputs(k - 1, 0);
    EXPECT_NEAR(ts.outputs(k, 0), 2.0 * x, 1e-12);
  }
}

TEST(MakeExcitation, SinesHaveAmplitudeRms) {
  Rng rng(1);
  const auto u = make_excitation(Excitation::kSumOfSines, 3000, 3, 2.0, 1.0 / 30.0, rng);
  EXPECT_EQ(u.rows(), 3000);
  EXPECT_EQ(u.cols(), 3);
  // Five unit-RMS-normalized components: peak at most amplitude·√10.
  EXPECT_LE(u.cwiseAbs().maxCoeff(), 2.0 * std::sqrt(10.0) + 1e-12);
  for (Eigen::Index c = 0; c < 3; ++c) {
    const double rms = std::sqrt(u.col(c).squaredNorm() / 3000.0);
    EXPECT_NEAR(rms, 2.0, 0.5) << c;
  }
}

}  // namespace
}  // namespace teleop
