#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "freecorr/text.hpp"
#include "helpers.hpp"

using namespace freecorr;

namespace {

struct TempFile {
  std::filesystem::path path;

  explicit TempFile(const std::string& name, const std::string& content) {
    path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << content;
  }
  ~TempFile() { std::error_code ec; std::filesystem::remove(path, ec); }
};

}  // namespace

TEST_CASE("word text parses and reprints unchanged") {
  for (const auto* text : {"A_1", "A_1 B_2", "A_1 B_2 (A C)_1", "(A B*)_3 C_1", "A*_2",
                           "(X Y Z)_7", "1"}) {
    const Word w = parse_word(text);
    CHECK(word_str(w) == text);
    CHECK(parse_word(word_str(w)) == w);
  }
}

TEST_CASE("word parsing applies normal form") {
  CHECK(parse_word("A_1 B_1") == parse_word("(A B)_1"));
  CHECK(parse_word("1_2").empty());
  CHECK(parse_word("A_1 1_5 B_1") == parse_word("(A B)_1"));
  CHECK(parse_word("  A_1   B_2 ") == parse_word("A_1 B_2"));
}

TEST_CASE("word parse errors carry the position and token") {
  CHECK_THROWS_AS(parse_word("A_0"), parse_error);
  CHECK_THROWS_AS(parse_word("A B_1"), parse_error);
  CHECK_THROWS_AS(parse_word("(A B_1"), parse_error);
  CHECK_THROWS_AS(parse_word("A_x"), parse_error);
  CHECK_THROWS_AS(parse_word("A_1 !"), parse_error);
  try {
    parse_word("A_1 B_?");
    FAIL("expected a parse error");
  } catch (const parse_error& e) {
    CHECK(e.position() == 6);
    CHECK_THAT(e.what(), Catch::Matchers::ContainsSubstring("position 6"));
  }
}

TEST_CASE("timed words parse times in order") {
  const TimedWord w = parse_timed_word("e(3) e(7) e(3)");
  CHECK(w.times == std::vector<std::int64_t>{3, 7, 3});
  CHECK(parse_timed_word("1").times.empty());
  CHECK(parse_timed_word("e(0)").times == std::vector<std::int64_t>{0});
  CHECK_THROWS_AS(parse_timed_word("e(-1)"), parse_error);
  CHECK_THROWS_AS(parse_timed_word("e(2"), parse_error);
  CHECK_THROWS_AS(parse_timed_word("f(2)"), parse_error);
  CHECK_THROWS_AS(parse_timed_word("1 e(2)"), parse_error);
}

TEST_CASE("patterns accept digits, comma lists, and timed words") {
  CHECK(parse_pattern("121").slots == std::vector<int>{1, 2, 1});
  CHECK(parse_pattern("1,2,1").slots == std::vector<int>{1, 2, 1});
  CHECK(parse_pattern("3,1,3").slots == std::vector<int>{1, 2, 1});
  CHECK(parse_pattern("e(1) e(2) e(1) e(2)").slots == std::vector<int>{1, 2, 1, 2});
  CHECK(parse_pattern("e(5) e(9) e(5)").slots == std::vector<int>{1, 2, 1});
  CHECK_THROWS_AS(parse_pattern("102"), parse_error);
  CHECK_THROWS_AS(parse_pattern(""), parse_error);
  CHECK_THROWS_AS(parse_pattern("1,0"), parse_error);
}

TEST_CASE("stream specs build the matching streams") {
  auto agree = [](const BitStream& a, const BitStream& b) {
    for (std::int64_t k = 1; k <= 200; ++k)
      if (a.bit(k) != b.bit(k)) return false;
    return true;
  };
  CHECK(agree(parse_stream_spec("constant:0"), BitStream::constant(0)));
  CHECK(agree(parse_stream_spec("constant:1"), BitStream::constant(1)));
  CHECK(agree(parse_stream_spec("thue-morse"), BitStream::thue_morse()));
  CHECK(agree(parse_stream_spec("periodic:0110"), BitStream::periodic({0, 1, 1, 0})));
  CHECK(agree(parse_stream_spec("bernoulli:0.5:seed=42"), BitStream::bernoulli(0.5, 42)));
  CHECK(agree(parse_stream_spec("bernoulli:0.25"), BitStream::bernoulli(0.25, 0)));
}

TEST_CASE("stream spec errors") {
  CHECK_THROWS_AS(parse_stream_spec("wat:3"), parse_error);
  CHECK_THROWS_AS(parse_stream_spec("constant:2"), parse_error);
  CHECK_THROWS_AS(parse_stream_spec("constant"), parse_error);
  CHECK_THROWS_AS(parse_stream_spec("periodic:"), parse_error);
  CHECK_THROWS_AS(parse_stream_spec("periodic:01x"), parse_error);
  CHECK_THROWS_AS(parse_stream_spec("bernoulli:1.5"), parse_error);
  CHECK_THROWS_AS(parse_stream_spec("bernoulli:0.5:sand=1"), parse_error);
  CHECK_THROWS_AS(parse_stream_spec("thue-morse:1"), parse_error);
}

TEST_CASE("file streams read one bit per line") {
  TempFile f("freecorr_bits.txt", "0\n1\n1\n0\n");
  const BitStream s = parse_stream_spec("file:" + f.path.string());
  const BitStream ref = BitStream::explicit_bits({0, 1, 1, 0});
  for (std::int64_t k = 1; k <= 4; ++k) CHECK(s.bit(k) == ref.bit(k));
  CHECK_THROWS(s.bit(5));

  TempFile bad("freecorr_bits_bad.txt", "0\n2\n");
  CHECK_THROWS_AS(parse_stream_spec("file:" + bad.path.string()), parse_error);
  TempFile empty("freecorr_bits_empty.txt", "");
  CHECK_THROWS_AS(parse_stream_spec("file:" + empty.path.string()), parse_error);
  CHECK_THROWS_AS(parse_stream_spec("file:/nonexistent/bits.txt"), parse_error);
}

TEST_CASE("monomials parse symbols with adjoint marks") {
  const SymbolMonomial m = parse_monomial("A* B");
  REQUIRE(m.size() == 2);
  CHECK(m[0] == ObservableSymbol::named("A", true));
  CHECK(m[1] == ObservableSymbol::named("B"));
  CHECK(parse_monomial("A C") ==
        SymbolMonomial{ObservableSymbol::named("A"), ObservableSymbol::named("C")});
  CHECK_THROWS_AS(parse_monomial(""), parse_error);
  CHECK_THROWS_AS(parse_monomial("A ,"), parse_error);
}

TEST_CASE("marginals files map monomials to complex values") {
  std::istringstream in(
      "# second moments\n"
      "A = 0.5\n"
      "A C = 0.7,0.1\n"
      "\n"
      "B = 1.0   # mean of B\n");
  const auto table = parse_marginal_lines(in);
  REQUIRE(table.size() == 3);
  CHECK(table.at(parse_monomial("A")) == Complex(0.5, 0.0));
  CHECK(table.at(parse_monomial("A C")) == Complex(0.7, 0.1));
  CHECK(table.at(parse_monomial("B")) == Complex(1.0, 0.0));

  const auto state = MarginalState<Complex>::from_table(table);
  CHECK(state(parse_monomial("A C")) == Complex(0.7, 0.1));
  CHECK_THROWS_AS(state(parse_monomial("C A")), missing_moment_error);
}

TEST_CASE("marginals parse errors") {
  std::istringstream no_eq("A C 0.7\n");
  CHECK_THROWS_AS(parse_marginal_lines(no_eq), parse_error);
  std::istringstream dup("A = 1\nA = 2\n");
  CHECK_THROWS_AS(parse_marginal_lines(dup), parse_error);
  std::istringstream bad_value("A = quux\n");
  CHECK_THROWS_AS(parse_marginal_lines(bad_value), parse_error);
  CHECK_THROWS_AS(parse_marginal_file("/nonexistent/marginals.txt"), parse_error);
}

TEST_CASE("observable files define sparse mode coefficients") {
  std::istringstream in(
      "mode 0 = 0.5\n"
      "mode -3 = 1.0,0.25\n"
      "mode 340282366920938463463374607431768211456 = 2.0\n");
  const FourierObservable f = parse_observable_lines(in);
  CHECK(f.c0() == Complex(0.5, 0.0));
  CHECK(f.mode(BigInt(-3)) == Complex(1.0, 0.25));
  CHECK(f.mode(BigInt(1) << 128) == Complex(2.0, 0.0));

  std::istringstream none("# nothing here\n");
  CHECK_THROWS_AS(parse_observable_lines(none), parse_error);
  std::istringstream missing_index("mode = 3\n");
  CHECK_THROWS_AS(parse_observable_lines(missing_index), parse_error);
  std::istringstream garbage("frequency 3 = 1\n");
  CHECK_THROWS_AS(parse_observable_lines(garbage), parse_error);
  CHECK_THROWS_AS(parse_observable_file("/nonexistent/modes.obs"), parse_error);
}
