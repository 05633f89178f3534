#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <set>
#include <vector>

#include "doctest.h"

#include "hpc/common/io.hpp"
#include "hpc/common/linalg.hpp"
#include "hpc/common/parallel.hpp"
#include "hpc/common/rng.hpp"

using namespace hpc;
namespace fs = std::filesystem;

TEST_SUITE_BEGIN("common");

TEST_CASE("rng uniform stays in [0,1) and matches the splitmix construction") {
  Rng r(42);
  Rng probe(42);
  for (int i = 0; i < 1000; ++i) {
    const uint64_t raw = probe.next_u64();
    const double u = r.uniform();
    CHECK(u == static_cast<double>(raw >> 11) * 0x1.0p-53);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("rng normal consumes exactly two draws and follows box-muller") {
  Rng r(7);
  Rng probe(7);
  for (int i = 0; i < 100; ++i) {
    const double u1 = 1.0 - probe.uniform();
    const double u2 = probe.uniform();
    const double expect = std::sqrt(-2.0 * std::log(u1)) *
                          std::cos(6.283185307179586477 * u2);
    const uint64_t before = r.draw_count();
    const double got = r.normal();
    CHECK(r.draw_count() == before + 2);
    CHECK(got == doctest::Approx(expect).epsilon(1e-15));
  }
}

TEST_CASE("rng uniform_int covers both inclusive endpoints") {
  Rng r(3);
  std::set<int> seen;
  for (int i = 0; i < 2000; ++i) seen.insert(r.uniform_int(2, 5));
  CHECK(seen == std::set<int>{2, 3, 4, 5});
}

TEST_CASE("derived streams differ from the parent and from each other") {
  Rng root(1234);
  Rng a = root.derive(1);
  Rng b = root.derive(2);
  Rng a2 = root.derive(1, 7);
  CHECK(a.next_u64() != b.next_u64());
  CHECK(a.next_u64() != a2.next_u64());
  // deriving is a pure function of (seed, a, b)
  Rng again = Rng(1234).derive(1);
  Rng once_more = Rng(1234).derive(1);
  CHECK(again.next_u64() == once_more.next_u64());
}

TEST_CASE("uniform mean settles near one half") {
  Rng r(99);
  double s = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) s += r.uniform();
  CHECK(s / n == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("format_double round-trips exactly") {
  for (double v : {0.1, 1.0 / 3.0, 6.02e23, -0.0, 1e-300, 3.141592653589793}) {
    const std::string s = format_double(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
}

TEST_CASE("csv writer emits deterministic bytes and read_csv inverts it") {
  const fs::path dir = fs::temp_directory_path() / "hpc_csv_test";
  fs::create_directories(dir);
  const fs::path p1 = dir / "a.csv", p2 = dir / "b.csv";
  for (const fs::path& p : {p1, p2}) {
    CsvWriter w(p, {"x", "y"});
    w.write_row({1.5, 2.0 / 3.0});
    w.write_row({-0.25, 1e-20});
    w.flush();
  }
  CHECK(read_text_file(p1) == read_text_file(p2));

  std::vector<std::string> header;
  auto rows = read_csv(p1, &header);
  REQUIRE(header == std::vector<std::string>{"x", "y"});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0][1] == 2.0 / 3.0);
  CHECK(rows[1][0] == -0.25);

  CsvWriter w(dir / "c.csv", {"a", "b"});
  CHECK_THROWS(w.write_row({1.0}));
  fs::remove_all(dir);
}

TEST_CASE("cholesky factor reconstructs the matrix and rejects indefinite input") {
  // hand-checkable SPD matrix
  const std::vector<double> a{4, 12, -16, 12, 37, -43, -16, -43, 98};
  std::vector<double> l(9, 0.0);
  REQUIRE(cholesky(a, 3, l));
  // known factor: [[2,0,0],[6,1,0],[-8,5,3]]
  CHECK(l[0] == doctest::Approx(2));
  CHECK(l[3] == doctest::Approx(6));
  CHECK(l[4] == doctest::Approx(1));
  CHECK(l[6] == doctest::Approx(-8));
  CHECK(l[7] == doctest::Approx(5));
  CHECK(l[8] == doctest::Approx(3));
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += l[i * 3 + k] * l[j * 3 + k];
      CHECK(s == doctest::Approx(a[i * 3 + j]).epsilon(1e-12));
    }
  }
  const std::vector<double> bad{1, 2, 2, 1};  // eigenvalues -1, 3
  std::vector<double> lb(4);
  CHECK_FALSE(cholesky(bad, 2, lb));
}

TEST_CASE("lower_tri_matvec agrees with dense multiplication") {
  const std::vector<double> l{2, 0, 0, 6, 1, 0, -8, 5, 3};
  const std::vector<double> x{1, -2, 0.5};
  std::vector<double> y(3);
  lower_tri_matvec(l, 3, x, y);
  CHECK(y[0] == doctest::Approx(2));
  CHECK(y[1] == doctest::Approx(4));
  CHECK(y[2] == doctest::Approx(-16.5));
}

TEST_CASE("jacobi eigenvalues match a known symmetric matrix") {
  const std::vector<double> a{2, 1, 1, 2};
  auto ev = symmetric_eigenvalues(a, 2);
  REQUIRE(ev.size() == 2);
  CHECK(ev[0] == doctest::Approx(1.0));
  CHECK(ev[1] == doctest::Approx(3.0));
}

TEST_CASE("worker pool runs every index exactly once across reuse") {
  for (int workers : {1, 2, 4}) {
    WorkerPool pool(workers);
    for (int round = 0; round < 3; ++round) {
      std::vector<int> hits(137, 0);
      pool.for_each(137, [&](int i) { hits[i]++; });
      CHECK(std::accumulate(hits.begin(), hits.end(), 0) == 137);
      CHECK(*std::min_element(hits.begin(), hits.end()) == 1);
      CHECK(*std::max_element(hits.begin(), hits.end()) == 1);
    }
  }
}

TEST_CASE("worker pool handles empty and single-element ranges") {
  WorkerPool pool(3);
  int calls = 0;
  pool.for_each(0, [&](int) { calls++; });
  CHECK(calls == 0);
  pool.for_each(1, [&](int) { calls++; });
  CHECK(calls == 1);
}

TEST_SUITE_END();
