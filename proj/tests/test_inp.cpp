#include <doctest.h>

#include <random>

#include "sfem/error.hpp"
#include "sfem/inp.hpp"
#include "sfem/mesh_gen.hpp"
#include "support.hpp"

using namespace sfem;

namespace {

const char* kSampleDeck =
    "*User element, nodes=5, type=U5, properties=2,coordinates=2\n"
    "1,2\n"
    "*Element, type=U5,ELSET=five\n"
    "1,1,2,8,5,4\n"
    "*UEL Property, ELSET=five\n"
    "3.0e+07, 0.30\n"
    "*User element, nodes=4, type=U4, properties=2,coordinates=2\n"
    "1,2\n"
    "*Element, type=U4,ELSET=four\n"
    "2,2,3,7,8\n"
    "3,8,7,6,5\n"
    "*UEL Property, ELSET=four\n"
    "3.0e+07, 0.30\n";

const ElementGroup& group(const Model& m, int n) {
  for (const auto& g : m.groups) {
    if (g.node_count == n) return g;
  }
  throw std::runtime_error("missing group");
}

std::string error_of(const std::string& text) {
  try {
    parse_inp(text);
  } catch (const ParseError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("the sample deck parses into two groups") {
  const auto m = parse_inp(kSampleDeck);
  REQUIRE(m.groups.size() == 2);
  const auto& u5 = group(m, 5);
  CHECK(u5.label() == "U5");
  REQUIRE(u5.elements.size() == 1);
  CHECK(u5.elements[0].id == 1);
  CHECK(u5.elements[0].nodes == std::vector<int>{1, 2, 8, 5, 4});
  const auto& u4 = group(m, 4);
  REQUIRE(u4.elements.size() == 2);
  CHECK(u4.elements[0].id == 2);
  CHECK(u4.elements[1].id == 3);
  CHECK(u4.elements[1].nodes == std::vector<int>{8, 7, 6, 5});
  for (const auto& g : m.groups) {
    CHECK(g.E == 3.0e7);
    CHECK(g.nu == 0.30);
  }
  CHECK(m.dim == 2);
  CHECK(parse_inp(write_inp(m)) == m);
}

TEST_CASE("an empty element section yields an empty group and a warning") {
  const auto m = parse_inp(
      "*User element, nodes=4, type=U4, properties=2, coordinates=2\n1,2\n"
      "*Element, type=U4, ELSET=four\n"
      "*UEL Property, ELSET=four\n1.0, 0.3\n");
  REQUIRE(m.groups.size() == 1);
  CHECK(m.groups[0].elements.empty());
  CHECK(!m.warnings.empty());
}

TEST_CASE("parse errors are located") {
  const auto wrong_count = error_of(
      "*User element, nodes=4, type=U4, properties=2, coordinates=2\n1,2\n"
      "*Element, type=U4, ELSET=four\n"
      "1,1,2,8,5,4\n"
      "*UEL Property, ELSET=four\n1.0, 0.3\n");
  CHECK(wrong_count.find("line 4") != std::string::npos);
  CHECK(wrong_count.find("element 1") != std::string::npos);

  const auto unknown = error_of("*Node\n1, 0, 0\n*Frobnicate, x=1\n");
  CHECK(unknown.find("line 3") != std::string::npos);
  CHECK(unknown.find("frobnicate") != std::string::npos);

  const auto missing = error_of(
      "*User element, nodes=3, type=U3, properties=2, coordinates=2\n1,2\n"
      "*Element, type=U3, ELSET=tri\n1,1,2,3\n");
  CHECK(missing.find("UEL Property") != std::string::npos);
  CHECK(missing.find("tri") != std::string::npos);

  CHECK(!error_of("*Node\n1, 0, 0, 0\n*User element, nodes=3, type=U3, properties=2, coordinates=2\n1,2\n").empty());
  CHECK(!error_of("*User element, nodes=3, type=U3, properties=2, coordinates=2\n1,2\n"
                  "*Element, type=U3, ELSET=t\n1,1,2,3\n*UEL Property, ELSET=t\n1.0, 0.5\n")
             .empty());
  CHECK_THROWS_AS(parse_inp("*Node\n1, 0, 0\n1, 1, 0\n"), ParseError);
}

TEST_CASE("keywords are case-insensitive and CRLF is accepted") {
  std::string text = kSampleDeck;
  for (auto& c : text) {
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  }
  std::string crlf;
  for (char c : text) {
    if (c == '\n') crlf += '\r';
    crlf += c;
  }
  const auto a = parse_inp(kSampleDeck);
  const auto b = parse_inp(crlf);
  CHECK(b.groups.size() == 2);
  CHECK(group(b, 5).elements[0].nodes == group(a, 5).elements[0].nodes);
}

TEST_CASE("continuation lines and comments") {
  const auto m = parse_inp(
      "** a comment\n*Node\n1, 0, 0\n2, 1, 0\n3, 1, 1\n4, 0, 1\n"
      "*User element, nodes=4, type=U4, properties=2, coordinates=2\n1,2\n"
      "*Element, type=U4, ELSET=q\n1, 1, 2,\n3, 4\n"
      "*UEL Property, ELSET=q\n2.0, 0.25\n"
      "*Boundary\n1, 1, 2\n2, 2, 2, 0.5\n");
  REQUIRE(m.groups.size() == 1);
  CHECK(m.groups[0].elements[0].nodes == std::vector<int>{1, 2, 3, 4});
  CHECK(m.boundary.size() == 3);
  CHECK(m.boundary.back() == InpBoundary{2, 2, 0.5});
  const auto mesh = to_mesh(m);
  CHECK(element_measure(mesh, 0) == doctest::Approx(1.0));
}

TEST_CASE("grouping by node count on write") {
  const auto tri = make_model(
      Mesh(2, {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)}, {{{0, 1, 2}, {}}}), 1.0, 0.3);
  const auto text = write_inp(tri);
  CHECK(text.find("type=U3") != std::string::npos);
  std::size_t blocks = 0;
  for (auto pos = text.find("*User element"); pos != std::string::npos; pos = text.find("*User element", pos + 1)) ++blocks;
  CHECK(blocks == 1);

  const Mesh m3(2, {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0), Vec3(0, 1, 0), Vec3(1, 1, 0), Vec3(2, 1, 0), Vec3(2.5, 0.5, 0)},
                {{{0, 1, 4, 3}, {}}, {{1, 2, 5, 4}, {}}, {{2, 6, 5}, {}}});
  const auto pent = make_model(voronoi_mesh(DomainGeometry::rectangle(1.0, 1.0), 30, 5, 42), 1.0, 0.3);
  const auto mix = write_inp(make_model(m3, 1.0, 0.3));
  blocks = 0;
  for (auto pos = mix.find("*User element"); pos != std::string::npos; pos = mix.find("*User element", pos + 1)) ++blocks;
  CHECK(blocks == 2);
  const auto parsed = parse_inp(write_inp(pent));
  for (std::size_t i = 1; i < parsed.groups.size(); ++i) CHECK(parsed.groups[i - 1].node_count > parsed.groups[i].node_count);
  for (const auto& g : parsed.groups) {
    for (const auto& e : g.elements) CHECK(static_cast<int>(e.nodes.size()) == g.node_count);
  }
}

TEST_CASE("a three-group mesh writes three blocks") {
  // Triangle, quadrilateral and pentagon sharing edges.
  const Mesh m(2,
               {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0), Vec3(0, 1, 0), Vec3(2, 0, 0), Vec3(2.5, 0.8, 0),
                Vec3(2, 1.4, 0), Vec3(-0.5, 0.5, 0)},
               {{{0, 1, 2, 3}, {}}, {{1, 4, 5, 6, 2}, {}}, {{0, 3, 7}, {}}});
  const auto text = write_inp(make_model(m, 1.0, 0.3));
  std::size_t blocks = 0;
  for (auto pos = text.find("*User element"); pos != std::string::npos; pos = text.find("*User element", pos + 1)) ++blocks;
  CHECK(blocks == 3);
  CHECK(text.find("U5") < text.find("U4"));
  CHECK(text.find("U4") < text.find("U3"));
}

TEST_CASE("round trips are exact") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> e(0.1, 1e9), nu(0.01, 0.49);
  for (int trial = 0; trial < 10; ++trial) {
    const auto mesh2 = voronoi_mesh(DomainGeometry::rectangle(1.0 + trial, 2.0), 10 + 5 * trial, 3, trial);
    auto m = make_model(mesh2, e(rng), nu(rng), trial % 2 ? Method::pfem : Method::csfem,
                        trial % 3 ? StressState::plane_stress : StressState::plane_strain);
    m.boundary.push_back({1, 2, std::ldexp(1.0, -trial) / 3.0});
    m.tractions.push_back({1, 1, Vec3(0.1, -0.7, 0.0)});
    if (trial % 2) m.body_force = Vec3(1e-17, 3.3, 0.0);
    const auto back = parse_inp(write_inp(m));
    CHECK(back == m);
    CHECK(to_mesh(back) == mesh2);
  }
  const auto mesh3 = polyhedral_box_mesh(DomainGeometry::box(Vec3(1, 2, 1)), 6, 2, 3, 9);
  const auto m3 = make_model(mesh3, 210e9, 0.29);
  const auto back3 = parse_inp(write_inp(m3));
  CHECK(back3 == m3);
  CHECK(to_mesh(back3) == mesh3);
  CHECK(element_materials(back3).size() == mesh3.element_count());
}
