#include <gtest/gtest.h>

#include <cmath>
#include <regex>
#include <sstream>

#include "rscn/configurator.hpp"
#include "rscn/error.hpp"
#include "rscn/model.hpp"
#include "rscn/rng.hpp"

namespace rscn {
namespace {

std::string replace_field(const std::string& text, const std::string& key, const std::string& value) {
  const std::regex re("\"" + key + "\":\\s*[0-9]+");
  return std::regex_replace(text, re, "\"" + key + "\": " + value, std::regex_constants::format_first_only);
}

ScnModel small_model() {
  ScnModel m;
  m.input_dim = 2;
  m.output_dim = 2;
  m.nodes = {HiddenNode{{0.5, -1.25}, 0.1}, HiddenNode{{3.0, 0.0}, -2.0}, HiddenNode{{-0.3, 0.7}, 1e-17}};
  m.beta = Matrix(3, 2);
  m.beta << 1.0, -0.1, 0.3333333333333333, 2.5, -7.0, 1e-300;
  return m;
}

TEST(Sigmoid, Values) {
  EXPECT_EQ(activate(ActivationKind::Sigmoid, 0.0), 0.5);
  EXPECT_NEAR(activate(ActivationKind::Sigmoid, 1.0), 0.7310585786, 1e-10);
  for (double z : {0.1, 1.0, 5.0, 30.0, 300.0}) {
    EXPECT_NEAR(activate(ActivationKind::Sigmoid, z) + activate(ActivationKind::Sigmoid, -z), 1.0, 1e-15) << z;
  }
}

TEST(Sigmoid, StaysInsideOpenInterval) {
  for (double z : {-700.0, -300.0, -40.0, 0.0, 30.0}) {
    const double g = activate(ActivationKind::Sigmoid, z);
    EXPECT_GT(g, 0.0) << z;
    EXPECT_LT(g, 1.0) << z;
  }
  EXPECT_TRUE(std::isfinite(activate(ActivationKind::Sigmoid, -1e6)));
}

TEST(Sigmoid, VectorisedAgreesWithScalar) {
  Rng rng(3);
  Eigen::MatrixXd z(40, 25);
  for (Eigen::Index i = 0; i < z.size(); ++i) z.data()[i] = rng.uniform(-750.0, 750.0);
  z(0, 0) = 0.0;
  z(1, 0) = -2000.0;
  Eigen::MatrixXd g = z;
  activate_inplace(ActivationKind::Sigmoid, g);
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double s = activate(ActivationKind::Sigmoid, z.data()[i]);
    const double v = g.data()[i];
    EXPECT_NEAR(v, s, 4 * std::numeric_limits<double>::epsilon() * s + 1e-300) << z.data()[i];
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(NodeOutput, ZeroNodeGivesHalf) {
  const Matrix x = Matrix::Random(7, 3);
  const Vector h = node_output(HiddenNode{{0, 0, 0}, 0.0}, x);
  EXPECT_TRUE((h.array() == 0.5).all());
}

TEST(NodeOutput, PerEntrySigmoid) {
  Matrix x(2, 1);
  x << 0, 1;
  const Vector h = node_output(HiddenNode{{1.0}, 0.0}, x);
  EXPECT_EQ(h(0), 0.5);
  EXPECT_NEAR(h(1), 0.7310585786, 1e-10);
}

TEST(NodeOutput, EmptyBatch) {
  EXPECT_EQ(node_output(HiddenNode{{1.0}, 0.0}, Matrix(0, 1)).size(), 0);
}

TEST(NodeOutput, DimensionMismatchThrows) {
  EXPECT_THROW(node_output(HiddenNode{{1.0, 2.0}, 0.0}, Matrix::Ones(3, 1)), ContractViolation);
}

TEST(Forward, ZeroWeightsGiveZero) {
  ScnModel m;
  m.input_dim = 1;
  m.output_dim = 1;
  m.nodes = {HiddenNode{{2.0}, 1.0}};
  m.beta = Matrix::Zero(1, 1);
  EXPECT_EQ(forward(m, Matrix::Random(5, 1)).norm(), 0.0);
}

TEST(Forward, IdenticalNodesCancel) {
  ScnModel m;
  m.input_dim = 1;
  m.output_dim = 1;
  m.nodes = {HiddenNode{{2.0}, 1.0}, HiddenNode{{2.0}, 1.0}};
  m.beta = Matrix(2, 1);
  m.beta << 1, -1;
  EXPECT_EQ(forward(m, Matrix::Random(5, 1)).norm(), 0.0);
}

TEST(Forward, EmptyModelThrows) {
  ScnModel m;
  m.input_dim = 1;
  m.output_dim = 1;
  m.beta = Matrix(0, 1);
  EXPECT_THROW(forward(m, Matrix::Ones(2, 1)), EmptyModel);
}

TEST(Forward, WrongInputWidthThrows) {
  EXPECT_THROW(forward(small_model(), Matrix::Ones(2, 3)), ContractViolation);
}

TEST(Forward, ConstantTargetOneNodeMatchesLeastSquaresOracle) {
  // With one node the fit is the LS projection of T onto h; compare against
  // the scalar normal equation β = hᵀt / hᵀh.
  Rng data(9);
  Matrix x(40, 1);
  for (Eigen::Index i = 0; i < x.rows(); ++i) x(i, 0) = data.uniform(0.0, 1.0);
  const Matrix t = Matrix::Constant(40, 1, 0.5);
  ScnConfig cfg;
  cfg.l_max = 1;
  Rng rng(1);
  const BuildResult b = build_round(x, t, DiagonalWeights::uniform(40), cfg, rng);
  ASSERT_EQ(b.model.nodes.size(), 1u);
  const Vector h = node_output(b.model.nodes[0], x);
  const double beta = h.dot(t.col(0)) / h.squaredNorm();
  EXPECT_NEAR(b.model.beta(0, 0), beta, 1e-10 * std::abs(beta));
  const Matrix out = forward(b.model, x);
  EXPECT_LT((out.col(0) - beta * h).norm(), 1e-10);
}

TEST(Forward, RawInputsAreNormalisedAndOutputsMappedBack) {
  ScnModel m;
  m.input_dim = 1;
  m.output_dim = 1;
  m.nodes = {HiddenNode{{0.0}, 0.0}};
  m.beta = Matrix::Constant(1, 1, 1.0);  // normalised output 0.5 everywhere
  m.normalization = Normalization{{ColumnRange{0.0, 10.0}}, {ColumnRange{2.0, 6.0}}};
  const Matrix y = forward(m, Matrix::Constant(3, 1, 7.0), InputScale::Raw);
  EXPECT_NEAR(y(0, 0), 4.0, 1e-15);
}

TEST(ModelIo, RoundTripIsExact) {
  ScnModel m = small_model();
  m.normalization = Normalization{{ColumnRange{-1.0, 1.0}, ColumnRange{0.1, 0.2}}, {ColumnRange{3.0, 3.0}, {0, 1}}};
  std::stringstream ss;
  save_model(m, ss);
  const ScnModel back = load_model(ss);
  EXPECT_EQ(back, m);
}

TEST(ModelIo, RoundTripWithoutNormalisation) {
  const ScnModel m = small_model();
  std::stringstream ss;
  save_model(m, ss);
  EXPECT_EQ(load_model(ss), m);
}

TEST(ModelIo, TruncatedInputFails) {
  std::stringstream ss;
  save_model(small_model(), ss);
  const std::string text = ss.str();
  for (std::size_t cut : {std::size_t{0}, text.size() / 3, text.size() - 2}) {
    std::istringstream in(text.substr(0, cut));
    EXPECT_THROW(load_model(in), DeserializationError) << "cut at " << cut;
  }
}

TEST(ModelIo, VersionMismatchNamesBothVersions) {
  std::stringstream ss;
  save_model(small_model(), ss);
  const std::string text = replace_field(ss.str(), "version", "7");
  ASSERT_NE(text, ss.str());
  std::istringstream in(text);
  try {
    load_model(in);
    FAIL() << "expected DeserializationError";
  } catch (const DeserializationError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find('7'), std::string::npos) << msg;
    EXPECT_NE(msg.find('1'), std::string::npos) << msg;
  }
}

TEST(ModelIo, InconsistentDimensionsFail) {
  std::stringstream ss;
  save_model(small_model(), ss);
  const std::string text = replace_field(ss.str(), "node_count", "4");
  ASSERT_NE(text, ss.str());
  std::istringstream in(text);
  EXPECT_THROW(load_model(in), DeserializationError);
}

TEST(ModelIo, MissingFileIsIoError) {
  EXPECT_THROW(load_model_file("/nonexistent/dir/model.json"), IoError);
}

}  // namespace
}  // namespace rscn
