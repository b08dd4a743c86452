#include <doctest.h>

#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "matbf/errors.hpp"
#include "matbf/io.hpp"
#include "matbf/linalg.hpp"
#include "matbf/rng.hpp"
#include "matbf/types.hpp"
#include "support.hpp"

using namespace matbf;

TEST_CASE("validate_spd on fixed matrices") {
  CHECK(validate_spd(Mat::Identity(3, 3)));
  Mat A(2, 2);
  A << 1, 2, 2, 1;
  CHECK_FALSE(validate_spd(A));
  Mat B(2, 2);
  B << 2, 0.5, 0.4, 2;  // asymmetric beyond tolerance
  CHECK_FALSE(validate_spd(B));
  CHECK_THROWS_AS(validate_spd(Mat::Ones(2, 3)), ShapeError);
}

TEST_CASE("validate_spd agrees with a symmetric eigensolver") {
  CounterRng rng(11);
  for (int rep = 0; rep < 50; ++rep) {
    const Mat A = rng.normal_matrix(5, 5);
    const Mat S = A * A.transpose() + 1e-6 * Mat::Identity(5, 5);
    const double min_eig = Eigen::SelfAdjointEigenSolver<Mat>(S).eigenvalues().minCoeff();
    CHECK(min_eig > 0.0);
    CHECK(validate_spd(S));
  }
}

TEST_CASE("SpdFactor logdet and solves match dense algebra") {
  CounterRng rng(5);
  const Mat S = test::random_spd(rng, 4);
  const SpdFactor F(S, "S");
  CHECK(F.logdet() == doctest::Approx(std::log(S.determinant())).epsilon(1e-12));
  const Mat B = rng.normal_matrix(4, 3);
  CHECK((F.solve(B) - S.inverse() * B).norm() < 1e-10);
  CHECK(trace_solve(F, S) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK_THROWS_AS(SpdFactor(-S, "negated"), CovarianceError);
}

TEST_CASE("kron_quad equals the dense Kronecker quadratic form") {
  CounterRng rng(6);
  for (int rep = 0; rep < 10; ++rep) {
    const Mat R = test::random_spd(rng, 3), C = test::random_spd(rng, 2);
    const Mat D = rng.normal_matrix(3, 2);
    const Vec d = test::vec_rows(D);
    const double dense = d.dot(test::kron(R, C).inverse() * d);
    CHECK(kron_quad(SpdFactor(R, "R"), D, SpdFactor(C, "C")) ==
          doctest::Approx(dense).epsilon(1e-11));
  }
}

TEST_CASE("MatrixSeries enforces shape, finiteness and order") {
  MatrixSeries s(2, 3);
  s.push_back(1, Mat::Zero(2, 3));
  s.push_back(4, Mat::Ones(2, 3));  // gaps are allowed
  CHECK(s.size() == 2);
  CHECK_THROWS_AS(s.push_back(5, Mat::Zero(3, 2)), ShapeError);
  CHECK_THROWS_AS(s.push_back(4, Mat::Zero(2, 3)), InputError);
  Mat bad = Mat::Zero(2, 3);
  bad(1, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(s.push_back(9, bad), InputError);
  CHECK_THROWS_AS(MatrixSeries(0, 3), ShapeError);
  CHECK(s.slice(1, 2)[0].t == 4);
}

TEST_CASE("model validation") {
  KnownVModel m{Mat::Zero(2, 2), Mat::Identity(2, 2), Mat::Identity(2, 2), 1.0};
  CHECK_NOTHROW(m.validate());
  m.phi = 0.0;
  CHECK_THROWS_AS(m.validate(), DomainError);
  NIWModel w{Mat::Zero(2, 2), Mat::Identity(2, 2), 1.0, 1.0, Mat::Identity(2, 2), 4.0};
  CHECK_THROWS_AS(w.validate(), DomainError);  // m must exceed 2n
  w.m = 4.5;
  CHECK_NOTHROW(w.validate());
}

TEST_CASE("format_double round-trips bit-exactly") {
  CounterRng rng(7);
  for (int i = 0; i < 2000; ++i) {
    const double x = rng.normal() * std::pow(10.0, static_cast<int>(rng.below(40)) - 20);
    CHECK(std::stod(format_double(x)) == x);
  }
  CHECK(format_double(0.1) == "0.1");
}

TEST_CASE("series CSV round trip reproduces every entry") {
  CounterRng rng(8);
  MatrixSeries s(3, 2, {"a", "b", "c"}, {"x", "y"});
  for (long t : {1L, 2L, 5L, 6L}) s.push_back(t, rng.normal_matrix(3, 2) * 1e3);
  std::stringstream csv, man;
  write_series_csv(csv, s);
  write_manifest(man, s);
  const Manifest m = parse_manifest(man);
  CHECK(m.row_labels == s.row_labels());
  const MatrixSeries back = parse_series_csv(csv, m);
  REQUIRE(back.size() == s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(back[i].t == s[i].t);
    CHECK((back[i].Y.array() == s[i].Y.array()).all());
  }
}

TEST_CASE("series CSV parser rejects malformed input") {
  const Manifest m{1, 2, {}, {}};
  auto parse = [&](const std::string& text) {
    std::istringstream in(text);
    return parse_series_csv(in, m);
  };
  CHECK_THROWS_AS(parse("time,row,col,value\n"), InputError);
  CHECK_THROWS_AS(parse("t,row,col,value\n1,1,1,0.5\n"), InputError);  // missing cell
  CHECK_THROWS_AS(parse("t,row,col,value\n1,1,1,0.5\n1,1,1,0.5\n1,1,2,1\n"), InputError);
  CHECK_THROWS_AS(parse("t,row,col,value\n1,1,3,0.5\n"), InputError);
  CHECK_THROWS_AS(parse("t,row,col,value\n2,1,1,0\n2,1,2,0\n1,1,1,0\n1,1,2,0\n"), InputError);
  CHECK_THROWS_AS(parse("t,row,col,value\n1,1,1,abc\n1,1,2,0\n"), InputError);
  CHECK(parse("t,row,col,value\n1,1,2,3\n1,1,1,4\n")[0].Y(0, 0) == 4.0);
  std::istringstream bad_manifest("{\"p\": 2}");
  CHECK_THROWS_AS(parse_manifest(bad_manifest), InputError);
  CHECK_THROWS_AS(read_manifest("/nonexistent/manifest.json"), InputError);
}

TEST_CASE("counter RNG is reproducible and stream-separated") {
  CounterRng a(42), b(42), c(42, 1);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    CHECK(x == b());
    differs = differs || (x != c());
  }
  CHECK(differs);
  std::set<std::uint64_t> seeds;
  for (std::uint64_t r = 0; r < 1000; ++r) seeds.insert(derive_seed(7, r));
  CHECK(seeds.size() == 1000);
  CounterRng u(3);
  for (int i = 0; i < 1000; ++i) {
    const double v = u.uniform();
    CHECK(v > 0.0);
    CHECK(v < 1.0);
    CHECK(u.below(5) < 5u);
  }
}

TEST_CASE("standard normal draws have unit moments") {
  CounterRng rng(9);
  const int N = 200000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < N; ++i) {
    const double z = rng.normal();
    s += z;
    s2 += z * z;
  }
  CHECK(std::abs(s / N) < 4.0 / std::sqrt(N));
  CHECK(std::abs(s2 / N - 1.0) < 4.0 * std::sqrt(2.0 / N));
}
