#include "support.hpp"

#include "cminet/errors.hpp"
#include "cminet/table.hpp"

#include <doctest.h>

#include <fstream>
#include <random>

using namespace cminet;
namespace ts = testsupport;

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream(path) << text;
}

std::string load_error(const std::filesystem::path& path) {
  try {
    load_count_table(path);
  } catch (const LoadError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_SUITE("core_data") {

TEST_CASE("all-zero table loads") {
  const auto dir = ts::scratch_dir("zeros");
  write_file(dir / "z.tsv", "sample\ta\tb\tc\nx\t0\t0\t0\ny\t0\t0\t0\nz\t0\t0\t0\n");
  const auto t = load_count_table(dir / "z.tsv");
  CHECK(t.n_samples() == 3);
  CHECK(t.n_taxa() == 3);
  CHECK(t.values().isZero());
}

TEST_CASE("load errors name the offending cell") {
  const auto dir = ts::scratch_dir("load_errors");
  write_file(dir / "neg.tsv", "sample\tOTU1\tOTU7\ns1\t1\t2\ns2\t3\t-4\n");
  const auto neg = load_error(dir / "neg.tsv");
  CHECK(neg.find("row 2") != std::string::npos);
  CHECK(neg.find("OTU7") != std::string::npos);

  write_file(dir / "dup.tsv", "sample\ta\ta\ns1\t1\t2\n");
  CHECK(load_error(dir / "dup.tsv").find("duplicate") != std::string::npos);

  write_file(dir / "dups.tsv", "sample\ta\tb\ns1\t1\t2\ns1\t1\t2\n");
  CHECK(load_error(dir / "dups.tsv").find("duplicate") != std::string::npos);

  write_file(dir / "text.tsv", "sample\ta\tb\ns1\t1\tabc\n");
  const auto text = load_error(dir / "text.tsv");
  CHECK(text.find("non-numeric") != std::string::npos);
  CHECK(text.find("'b'") != std::string::npos);

  write_file(dir / "missing.tsv", "sample\ta\tb\ns1\t1\t\n");
  CHECK_FALSE(load_error(dir / "missing.tsv").empty());

  write_file(dir / "ragged.tsv", "sample\ta\tb\ns1\t1\t2\ns2\t1\n");
  CHECK(load_error(dir / "ragged.tsv").find("ragged") != std::string::npos);

  CHECK_THROWS_AS(load_count_table(dir / "absent.tsv"), LoadError);
}

TEST_CASE("comma delimiter is detected") {
  const auto dir = ts::scratch_dir("comma");
  write_file(dir / "c.csv", "id,a,b\ns1,1,2\ns2,3,4.5\n");
  const auto t = load_count_table(dir / "c.csv");
  CHECK(t.taxa() == Labels{"a", "b"});
  CHECK(t.values()(1, 1) == 4.5);
}

TEST_CASE("taxa-in-rows file of 55 taxa by 100 samples") {
  const auto dir = ts::scratch_dir("orient");
  std::mt19937_64 rng(5);
  std::poisson_distribution<int> pois(7);
  Eigen::MatrixXd truth(100, 55);
  for (Eigen::Index i = 0; i < 100; ++i) {
    for (Eigen::Index j = 0; j < 55; ++j) truth(i, j) = pois(rng);
  }
  std::string text = "taxon";
  for (int i = 0; i < 100; ++i) text += "\tS" + std::to_string(i);
  text += '\n';
  for (int j = 0; j < 55; ++j) {
    text += "T" + std::to_string(j);
    for (int i = 0; i < 100; ++i) text += '\t' + std::to_string(static_cast<int>(truth(i, j)));
    text += '\n';
  }
  write_file(dir / "t.tsv", text);
  const auto t = load_count_table(dir / "t.tsv", Orientation::taxa_in_rows);
  CHECK(t.n_samples() == 100);
  CHECK(t.n_taxa() == 55);
  CHECK(t.values() == truth);
  CHECK(t.taxa()[54] == "T54");
  CHECK(t.samples()[0] == "S0");
}

TEST_CASE("write then load round-trips exactly") {
  const auto dir = ts::scratch_dir("roundtrip");
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1000.0);
  Eigen::MatrixXd v(12, 7);
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    for (Eigen::Index j = 0; j < v.cols(); ++j) v(i, j) = u(rng) / 3.0;
  }
  const CountTable t(v, ts::labels("s", 12), ts::labels("otu", 7));
  write_count_table(t, dir / "t.tsv");
  const auto back = load_count_table(dir / "t.tsv");
  CHECK(back.values() == t.values());
  CHECK(back.taxa() == t.taxa());
  CHECK(back.samples() == t.samples());
}

TEST_CASE("filter_taxa") {
  Eigen::MatrixXd v = Eigen::MatrixXd::Constant(10, 3, 2.0);
  v.col(1).setZero();
  v(0, 1) = 5.0;
  const CountTable t(v, ts::labels("s", 10), {"a", "b", "c"});

  CHECK(filter_taxa(t, 0.0, 0.0).values() == t.values());
  CHECK(filter_taxa(t, 0.2, 0.0).taxa() == Labels{"a", "c"});
  CHECK(filter_taxa(t, 0.0, 20.0).taxa() == Labels{"a", "c"});
  CHECK_THROWS_AS(filter_taxa(t, 0.0, 1000.0), FilterError);
  CHECK_THROWS_AS(filter_taxa(t, 1.5, 0.0), FilterError);

  std::mt19937_64 rng(17);
  std::bernoulli_distribution present(0.5);
  Eigen::MatrixXd r(30, 20);
  for (Eigen::Index i = 0; i < r.rows(); ++i) {
    for (Eigen::Index j = 0; j < r.cols(); ++j) r(i, j) = present(rng) ? 1.0 + i : 0.0;
  }
  const CountTable random(r, ts::labels("s", 30), ts::labels("otu", 20));
  Labels expected;
  for (Eigen::Index j = 0; j < r.cols(); ++j) {
    int count = 0;
    for (Eigen::Index i = 0; i < r.rows(); ++i) count += r(i, j) > 0.0;
    if (count >= 15) expected.push_back(random.taxa()[j]);
  }
  const auto kept = filter_taxa(random, 0.5, 0.0);
  CHECK(kept.taxa() == expected);
  CHECK(filter_taxa(kept, 0.5, 0.0).taxa() == kept.taxa());
}

TEST_CASE("to_composition") {
  Eigen::MatrixXd v(3, 4);
  v << 1, 1, 1, 1, 0, 0, 2, 2, 3, 1, 0, 4;
  const CountTable t(v, {"a", "b", "c"}, {"w", "x", "y", "z"});

  const auto zero_free = t.select_samples({0});
  CHECK(to_composition(zero_free, 0.0).values.isApprox(Eigen::MatrixXd::Constant(1, 4, 0.25)));
  CHECK_THROWS_AS(to_composition(t, 0.0), TransformError);

  const CountTable two(Eigen::MatrixXd::Zero(1, 2), {"s"}, {"a", "b"});
  CHECK(to_composition(two, 0.5).values.isApprox(Eigen::MatrixXd::Constant(1, 2, 0.5)));

  const CountTable three((Eigen::MatrixXd(1, 3) << 3, 1, 0).finished(), {"s"}, {"a", "b", "c"});
  const auto c = to_composition(three, 0.5);
  CHECK(c.values(0, 0) == doctest::Approx(3.5 / 5.5).epsilon(1e-14));
  CHECK(c.values(0, 1) == doctest::Approx(1.5 / 5.5).epsilon(1e-14));
  CHECK(c.values(0, 2) == doctest::Approx(0.5 / 5.5).epsilon(1e-14));

  const auto all = to_composition(t, 0.5);
  CHECK((all.values.array() > 0.0).all());
  CHECK((all.values.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-10);
  CHECK(all.pseudo == 0.5);
}

TEST_CASE("clr_transform") {
  CompositionTable c;
  c.values = Eigen::MatrixXd(2, 3);
  c.values << 1.0 / 3, 1.0 / 3, 1.0 / 3, 0.5, 0.25, 0.25;
  c.samples = {"u", "v"};
  c.taxa = {"a", "b", "c"};
  const auto z = clr_transform(c);
  CHECK(z.values.row(0).cwiseAbs().maxCoeff() < 1e-15);
  const double m = (std::log(0.5) + 2 * std::log(0.25)) / 3;
  CHECK(z.values(1, 0) == doctest::Approx(std::log(0.5) - m).epsilon(1e-14));
  CHECK(z.values(1, 1) == doctest::Approx(std::log(0.25) - m).epsilon(1e-14));
  CHECK(z.transform == Transform::clr);

  c.values(1, 2) = 0.0;
  CHECK_THROWS_AS(clr_transform(c), TransformError);

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 50.0);
  Eigen::MatrixXd r(40, 9);
  for (Eigen::Index i = 0; i < r.rows(); ++i) {
    for (Eigen::Index j = 0; j < r.cols(); ++j) r(i, j) = std::floor(u(rng));
  }
  const CountTable t(r, ts::labels("s", 40), ts::labels("otu", 9));
  const auto clr = clr_transform(to_composition(t, 0.5));
  CHECK(clr.values.rowwise().sum().cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("mclr_transform") {
  Eigen::MatrixXd v(5, 4);
  v << 3, 0, 1, 7,
       0, 0, 2, 9,
       5, 5, 0, 1,
       1, 2, 3, 4,
       0, 8, 0, 0;
  const CountTable t(v, ts::labels("s", 5), ts::labels("otu", 4));
  const auto z = mclr_transform(t);
  CHECK(((v.array() == 0.0) == (z.values.array() == 0.0)).all());
  double min_nonzero = 1e300;
  for (Eigen::Index i = 0; i < 5; ++i) {
    for (Eigen::Index j = 0; j < 4; ++j) {
      if (v(i, j) > 0.0) min_nonzero = std::min(min_nonzero, z.values(i, j));
    }
  }
  CHECK(std::abs(min_nonzero - 1.0) < 1e-10);

  const auto dense = t.select_samples({3});
  const auto clr = clr_transform(to_composition(dense, 0.0)).values;
  const Eigen::MatrixXd shifted = mclr_transform(dense, MclrShift::fixed(2.5)).values;
  CHECK(((shifted - clr).array() - 2.5).abs().maxCoeff() < 1e-12);

  Eigen::MatrixXd bad = v;
  bad.row(2).setZero();
  const CountTable with_empty(bad, ts::labels("s", 5), ts::labels("otu", 4));
  try {
    mclr_transform(with_empty);
    FAIL("expected TransformError");
  } catch (const TransformError& e) {
    CHECK(std::string(e.what()).find("s2") != std::string::npos);
  }
}

TEST_CASE("CountTable rejects invalid construction") {
  CHECK_THROWS_AS(CountTable(Eigen::MatrixXd::Zero(2, 2), {"a"}, {"x", "y"}), LoadError);
  CHECK_THROWS_AS(CountTable(-Eigen::MatrixXd::Ones(2, 2), {"a", "b"}, {"x", "y"}), LoadError);
  CHECK_THROWS_AS(CountTable(Eigen::MatrixXd::Zero(2, 2), {"a", "a"}, {"x", "y"}), LoadError);
}

}
