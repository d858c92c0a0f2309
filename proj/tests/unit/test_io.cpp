#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include <gtest/gtest.h>

#include "vr/dataset.hpp"
#include "vr/io.hpp"
#include "vr/params.hpp"

namespace {

namespace fs = std::filesystem;

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("vr_io_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  void write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name), std::ios::binary) << text;
  }

 private:
  fs::path dir_;
};

vr::ParamSet sample_params() {
  vr::ParamSet p;
  Eigen::MatrixXd a(2, 3);
  a << 1, 2, 3, 4, 5, 6;
  p.add("enc_w1", a);
  p.add("log_noise", Eigen::MatrixXd::Constant(1, 1, -0.125));
  p.add("empty", Eigen::MatrixXd(0, 4));
  return p;
}

TEST(ParamSet, BlocksAreViewsIntoTheFlatVector) {
  vr::ParamSet p = sample_params();
  EXPECT_EQ(p.size(), 7);
  EXPECT_EQ(p.block("enc_w1")(1, 2), 6.0);
  EXPECT_EQ(p.values()(5), 6.0);
  p.block("log_noise")(0, 0) = 3.0;
  EXPECT_EQ(p.values()(6), 3.0);
  EXPECT_THROW(p.add("enc_w1", Eigen::MatrixXd::Zero(1, 1)), std::invalid_argument);
  EXPECT_FALSE(p.contains("dec_w1"));
}

using ParamFile = TempDir;

TEST_F(ParamFile, RoundTripsBitExactly) {
  vr::ParamSet p = sample_params();
  p.values()(0) = 0.1 + 0.2;
  vr::save_params(p, path("p.bin"));
  const vr::ParamSet q = vr::load_params(path("p.bin"));
  EXPECT_TRUE(q.same_layout(p));
  EXPECT_EQ(q.values(), p.values());
  EXPECT_EQ(q.blocks()[2].rows, 0);
  EXPECT_EQ(q.blocks()[2].cols, 4);

  const std::string bytes = vr::read_file(path("p.bin"));
  EXPECT_EQ(bytes.substr(0, 8), "VRPARAMS");
  // header 16 + names (4+6+16, 4+9+16, 4+5+16) + 7 doubles
  EXPECT_EQ(bytes.size(), 16u + 26u + 29u + 25u + 56u);
}

TEST_F(ParamFile, RejectsDamagedFiles) {
  vr::save_params(sample_params(), path("p.bin"));
  const std::string good = vr::read_file(path("p.bin"));
  write("magic.bin", "XXPARAMS" + good.substr(8));
  EXPECT_THROW(vr::load_params(path("magic.bin")), std::runtime_error);
  write("short.bin", good.substr(0, good.size() - 3));
  EXPECT_THROW(vr::load_params(path("short.bin")), std::runtime_error);
  write("long.bin", good + "x");
  EXPECT_THROW(vr::load_params(path("long.bin")), std::runtime_error);
  std::string version = good;
  version[8] = 2;
  write("version.bin", version);
  EXPECT_THROW(vr::load_params(path("version.bin")), std::runtime_error);
  EXPECT_THROW(vr::load_params(path("missing.bin")), std::runtime_error);
}

TEST(GitHash, MatchesGitHashObject) {
  EXPECT_EQ(vr::git_blob_hash("hello\n"), "ce013625030ba8dba906f756967f9e9ca394464a");
  EXPECT_EQ(vr::git_blob_hash(""), "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
}

using Csv = TempDir;

TEST_F(Csv, LoadsSelectedColumns) {
  write("d.csv", "a,b, y\n1,2,3\n4, 5 ,6\n");
  const vr::Dataset all = vr::load_csv(path("d.csv"), {}, std::string("y"));
  EXPECT_EQ(all.size(), 2);
  EXPECT_EQ(all.dim(), 2);
  EXPECT_EQ(all.features(1, 1), 5.0);
  ASSERT_TRUE(all.targets.has_value());
  EXPECT_EQ((*all.targets)(1), 6.0);

  const vr::Dataset b_only = vr::load_csv(path("d.csv"), {"b"}, std::nullopt);
  EXPECT_EQ(b_only.dim(), 1);
  EXPECT_FALSE(b_only.targets.has_value());
  EXPECT_EQ(b_only.features(0, 0), 2.0);
}

TEST_F(Csv, RejectsMalformedInput) {
  write("bad_cell.csv", "a,y\n1,2\nx,3\n");
  EXPECT_THROW(vr::load_csv(path("bad_cell.csv"), {}, std::string("y")), std::invalid_argument);
  write("nan.csv", "a,y\n1,nan\n");
  EXPECT_THROW(vr::load_csv(path("nan.csv"), {}, std::string("y")), std::invalid_argument);
  write("ragged.csv", "a,y\n1,2,3\n");
  EXPECT_THROW(vr::load_csv(path("ragged.csv"), {}, std::string("y")), std::invalid_argument);
  write("ok.csv", "a,y\n1,2\n");
  EXPECT_THROW(vr::load_csv(path("ok.csv"), {"c"}, std::string("y")), std::invalid_argument);
  EXPECT_THROW(vr::load_csv(path("ok.csv"), {}, std::string("z")), std::invalid_argument);
  write("empty.csv", "a,y\n");
  EXPECT_THROW(vr::load_csv(path("empty.csv"), {}, std::string("y")), std::invalid_argument);
  EXPECT_THROW(vr::load_csv(path("none.csv"), {}, std::string("y")), std::runtime_error);
}

TEST_F(Csv, WriteThenReadIsLossless) {
  const vr::Dataset d = vr::make_regression_toy(25, 3);
  vr::write_csv(d, path("toy.csv"));
  const vr::Dataset back = vr::load_csv(path("toy.csv"), {}, d.target_name);
  EXPECT_EQ(back.features, d.features);
  EXPECT_EQ(*back.targets, *d.targets);
  EXPECT_EQ(back.feature_names, d.feature_names);
}

TEST(Dataset, SplitIsAPartitionAndSeeded) {
  const vr::Split s = vr::train_test_split(50, 0.2, 7);
  EXPECT_EQ(s.test.size(), 10u);
  EXPECT_EQ(s.train.size(), 40u);
  std::set<Eigen::Index> seen(s.train.begin(), s.train.end());
  seen.insert(s.test.begin(), s.test.end());
  EXPECT_EQ(seen.size(), 50u);
  EXPECT_EQ(vr::train_test_split(50, 0.2, 7).test, s.test);
  EXPECT_NE(vr::train_test_split(50, 0.2, 8).test, s.test);
  EXPECT_THROW(vr::train_test_split(50, 1.0, 7), std::invalid_argument);
}

TEST(Dataset, StandardizerUsesTrainingStatistics) {
  vr::Dataset d;
  d.features.resize(4, 2);
  d.features << 1, 5, 2, 5, 3, 5, 4, 5;
  d.targets = Eigen::Vector4d(10, 20, 30, 40);
  const vr::Standardizer st = vr::Standardizer::fit(d);
  EXPECT_DOUBLE_EQ(st.mean(0), 2.5);
  EXPECT_EQ(st.sd(1), 1.0);  // constant column keeps unit scale
  const vr::Dataset z = st.apply(d);
  EXPECT_NEAR(z.features.col(0).mean(), 0.0, 1e-15);
  EXPECT_NEAR(z.features.col(0).squaredNorm() / 3.0, 1.0, 1e-12);
  EXPECT_NEAR(z.targets->mean(), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(st.target_mean, 25.0);
}

TEST(Dataset, GeneratorsAreSeeded) {
  const vr::Dataset a = vr::make_binary_digits(30, 4);
  const vr::Dataset b = vr::make_binary_digits(30, 4);
  EXPECT_EQ(a.features, b.features);
  EXPECT_EQ(a.dim(), 64);
  EXPECT_TRUE((a.features.array() == 0.0 || a.features.array() == 1.0).all());
  EXPECT_FALSE(a.targets.has_value());
  EXPECT_NE(vr::make_binary_digits(30, 5).features, a.features);

  const vr::Dataset r = vr::make_regression_toy(40, 1);
  EXPECT_EQ(r.dim(), 1);
  EXPECT_TRUE((r.features.array().abs() <= 4.0).all());
}

TEST(Dataset, BatchesAreColumnMajorViews) {
  const vr::Dataset r = vr::make_regression_toy(10, 2);
  const Eigen::Index rows[] = {3, 7};
  const vr::Batch b = vr::make_batch(r, rows, 5.0);
  EXPECT_EQ(b.inputs.rows(), 1);
  EXPECT_EQ(b.size(), 2);
  EXPECT_EQ(b.inputs(0, 1), r.features(7, 0));
  EXPECT_EQ(b.targets(0, 0), (*r.targets)(3));
  EXPECT_EQ(b.likelihood_scale, 5.0);
}

}  // namespace
