#include <doctest.h>

#include "flagein/errors.hpp"
#include "flagein/flag.hpp"

using namespace flagein;

namespace {

struct Row {
  const char* flag;
  int summands;
  bool equivalent;
  int dim_m;
};

// summand data of the classification table; dim m = dim K - dim K_Theta
const Row kRows[] = {
    {"A:3:[2,2]:-", 2, false, 6 - 2},
    {"B:3:[1,2]:+", 2, false, 9 - 4},
    {"B:5:[1,4]:+", 2, false, 25 - 16},
    {"B:3:[3]:-", 2, false, 9 - 3},
    {"B:6:[6]:-", 2, false, 36 - 15},
    {"C:3:[3]:-", 2, false, 9 - 3},
    {"C:5:[5]:-", 2, false, 25 - 10},
    {"C:4:[1,3]:+", 2, false, 16 - 9},
    {"D:4:[4]:-", 2, false, 12 - 6},
    {"A:3:[2,1,1]:-", 3, true, 6 - 1},
    {"A:5:[1,2,3]:-", 3, false, 15 - 4},
    {"B:4:[4]:-", 3, false, 16 - 6},
    {"B:5:[2,3]:+", 3, false, 25 - 10},
    {"C:5:[2,3]:+", 3, false, 25 - 10},
    {"D:4:[3,1]:-", 3, true, 12 - 3},
    {"D:5:[4,1]:-", 3, true, 20 - 6},
};

}  // namespace

TEST_CASE("flag spec text round trip") {
  for (const auto& r : kRows) CHECK(parse_flag_spec(r.flag).to_string() == r.flag);
  CHECK(parse_flag_spec("a:3:[2,2]:-").to_string() == "A:3:[2,2]:-");
}

TEST_CASE("malformed flag specs") {
  for (const char* bad : {"", "A", "A:3", "A:3:[2,2]", "A:3:[2,2]:", "A:3:[2,2]:x", "A:3:(2,2):-", "AB:3:[2,2]:-",
                          "A:x:[2,2]:-", "A:3:[2,,2]:-", "A:3:[]:-", "A:3:[2,2]:-+", "E:6:[6]:-"})
    CHECK_THROWS_AS(parse_flag_spec(bad), BadFlag);
  CHECK_THROWS_AS(parse_flag_spec("A:3:[2,1]:-"), BadPartition);
  CHECK_THROWS_AS(parse_flag_spec("B:3:[0,3]:+"), BadPartition);
  CHECK_THROWS_AS(parse_flag_spec("A:3:[2,2]:+"), BadFlag);
}

TEST_CASE("Theta from the partition") {
  CHECK(theta_string(parse_flag_spec("A:3:[2,1,1]:-")) == "{a1}");
  CHECK(parse_flag_spec("A:3:[2,2]:-").theta() == std::vector<int>{1, 3});
  CHECK(parse_flag_spec("B:4:[4]:-").theta() == std::vector<int>{1, 2, 3});
  CHECK(parse_flag_spec("B:4:[1,3]:+").theta() == std::vector<int>{2, 3, 4});
}

TEST_CASE("isotropy summands of the classification table") {
  for (const auto& r : kRows) {
    CAPTURE(r.flag);
    const auto spec = parse_flag_spec(r.flag);
    const auto dec = decompose_isotropy(spec);
    CHECK(int(dec.submodules.size()) == r.summands);
    CHECK(dec.has_equivalent_summands() == r.equivalent);
    int dim = 0;
    for (const auto& m : dec.submodules) dim += m.dim();
    CHECK(dim == r.dim_m);
    CHECK(int(split_reductive(spec).tangent.size()) == r.dim_m);
  }
}

TEST_CASE("decomposition outside the rule tables") {
  const auto spec = make_flag(Family::B, 3, {2, 1}, true);
  CHECK_FALSE(decomposition_implemented(spec));
  CHECK_THROWS_AS(decompose_isotropy(spec), UnimplementedCase);
}

TEST_CASE("enumeration of small flags") {
  std::vector<std::string> a3;
  for (const auto& s : enumerate_small_flags(Family::A, 3)) a3.push_back(s.to_string());
  CHECK(a3 == std::vector<std::string>{"A:3:[2,2]:-", "A:3:[1,1,2]:-", "A:3:[1,2,1]:-", "A:3:[2,1,1]:-"});
  for (Family f : {Family::B, Family::C, Family::D})
    for (const auto& s : enumerate_small_flags(f, 5)) {
      const auto n = decompose_isotropy(s).submodules.size();
      CHECK((n == 2 || n == 3));
    }
}
