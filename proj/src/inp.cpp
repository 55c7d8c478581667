#include "sfem/inp.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <set>
#include <sstream>

#include "sfem/error.hpp"

namespace sfem {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

struct Line {
  int number = 0;  // first physical line
  std::string text;
};

// Splits into logical lines: drops blanks and `**` comments, joins data or
// keyword lines that end with a comma to the following line.
std::vector<Line> logical_lines(const std::string& text) {
  std::vector<Line> out;
  std::istringstream in(text);
  std::string raw;
  int number = 0;
  bool continuing = false;
  while (std::getline(in, raw)) {
    ++number;
    const std::string s = trim(raw);
    if (s.empty() || s.rfind("**", 0) == 0) continue;
    if (continuing && s[0] != '*') {
      out.back().text += s;
    } else {
      out.push_back({number, s});
    }
    continuing = out.back().text.back() == ',';
  }
  return out;
}

struct Keyword {
  std::string name;
  std::map<std::string, std::string> params;
};

Keyword parse_keyword(const Line& line) {
  auto parts = split_commas(line.text.substr(1));
  Keyword kw;
  std::string name;
  for (char c : lower(parts[0])) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!name.empty() && name.back() != ' ') name += ' ';
    } else {
      name += c;
    }
  }
  kw.name = trim(name);
  for (std::size_t i = 1; i < parts.size(); ++i) {
    if (parts[i].empty()) continue;
    const auto eq = parts[i].find('=');
    const std::string key = lower(trim(parts[i].substr(0, eq)));
    kw.params[key] = eq == std::string::npos ? std::string{} : trim(parts[i].substr(eq + 1));
  }
  return kw;
}

std::vector<std::string> data_fields(const Line& line) {
  auto f = split_commas(line.text);
  while (!f.empty() && f.back().empty()) f.pop_back();
  return f;
}

int to_int(const std::string& s, int line) {
  int v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw ParseError(line, "expected an integer, got '" + s + "'");
  return v;
}

double to_real(const std::string& s, int line) {
  double v = 0.0;
  const char* b = s.data();
  if (!s.empty() && s[0] == '+') ++b;
  const auto [p, ec] = std::from_chars(b, s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw ParseError(line, "expected a number, got '" + s + "'");
  return v;
}

std::string require(const Keyword& kw, const std::string& key, int line) {
  const auto it = kw.params.find(key);
  if (it == kw.params.end() || it->second.empty()) {
    throw ParseError(line, "*" + kw.name + " is missing parameter '" + key + "'");
  }
  return it->second;
}

int label_nodes(const std::string& type, int line) {
  if (type.size() < 2 || (type[0] != 'U' && type[0] != 'u')) {
    throw ParseError(line, "user element type must be U<n>, got '" + type + "'");
  }
  return to_int(type.substr(1), line);
}

struct GroupState {
  ElementGroup group;
  int declared_line = 0;
  int element_line = 0;  // 0 when no *Element block was seen
  bool has_property = false;
};

}  // namespace

Model parse_inp(const std::string& text) {
  Model m;
  std::vector<GroupState> groups;
  std::map<int, std::size_t> group_by_nodes;
  std::map<std::string, std::size_t> group_by_elset;
  std::map<int, std::pair<std::size_t, std::size_t>> element_at;  // id -> (group, index)
  std::set<int> node_ids;
  std::vector<std::pair<int, std::vector<double>>> raw_nodes;
  std::vector<int> raw_node_lines;
  struct FaceRecord {
    int line;
    std::string elset;
    std::vector<int> fields;
  };
  std::vector<FaceRecord> face_records;
  int declared_dim = 0;
  int body_lines = 0;

  enum class Block { none, node, user_element, element, property, boundary, traction, body_force, faces, analysis };
  Block block = Block::none;
  std::size_t current = 0;  // group index for element/property blocks
  std::string current_elset;
  int block_line = 0;
  int block_rows = 0;

  auto close_block = [&]() {
    if (block == Block::user_element && block_rows == 0) {
      throw ParseError(block_line, "*User element needs a line listing its active degrees of freedom");
    }
    if (block == Block::element && block_rows == 0) {
      m.warnings.push_back("line " + std::to_string(block_line) + ": empty element section for ELSET " +
                           groups[current].group.elset);
    }
    if (block == Block::property && block_rows == 0) throw ParseError(block_line, "*UEL Property without values");
  };

  for (const auto& line : logical_lines(text)) {
    if (line.text[0] == '*') {
      close_block();
      const Keyword kw = parse_keyword(line);
      block_line = line.number;
      block_rows = 0;
      if (kw.name == "node") {
        block = Block::node;
      } else if (kw.name == "user element") {
        const int nodes = to_int(require(kw, "nodes", line.number), line.number);
        const std::string type = require(kw, "type", line.number);
        if (label_nodes(type, line.number) != nodes) {
          throw ParseError(line.number, "type " + type + " does not match nodes=" + std::to_string(nodes));
        }
        if (nodes < 3) throw ParseError(line.number, "user elements need at least 3 nodes");
        if (to_int(require(kw, "properties", line.number), line.number) != 2) {
          throw ParseError(line.number, "user elements take exactly 2 properties (E, nu)");
        }
        const int coords = to_int(require(kw, "coordinates", line.number), line.number);
        if (coords != 2 && coords != 3) throw ParseError(line.number, "coordinates must be 2 or 3");
        if (declared_dim != 0 && declared_dim != coords) {
          throw ParseError(line.number, "user elements mix 2D and 3D coordinates");
        }
        declared_dim = coords;
        if (group_by_nodes.count(nodes)) throw ParseError(line.number, "user element " + type + " declared twice");
        group_by_nodes[nodes] = groups.size();
        current = groups.size();
        GroupState g;
        g.group.node_count = nodes;
        g.declared_line = line.number;
        groups.push_back(g);
        block = Block::user_element;
      } else if (kw.name == "element") {
        const std::string type = require(kw, "type", line.number);
        const int nodes = label_nodes(type, line.number);
        const auto it = group_by_nodes.find(nodes);
        if (it == group_by_nodes.end()) throw ParseError(line.number, "element type " + type + " was not declared");
        const std::string elset = require(kw, "elset", line.number);
        auto& g = groups[it->second];
        if (g.element_line != 0 && g.group.elset != elset) {
          throw ParseError(line.number, "type " + type + " already uses ELSET " + g.group.elset);
        }
        if (auto e = group_by_elset.find(elset); e != group_by_elset.end() && e->second != it->second) {
          throw ParseError(line.number, "ELSET " + elset + " already holds another element type");
        }
        g.group.elset = elset;
        if (g.element_line == 0) g.element_line = line.number;
        group_by_elset[elset] = it->second;
        current = it->second;
        block = Block::element;
      } else if (kw.name == "uel property") {
        const std::string elset = require(kw, "elset", line.number);
        const auto it = group_by_elset.find(elset);
        if (it == group_by_elset.end()) throw ParseError(line.number, "*UEL Property for unknown ELSET " + elset);
        current = it->second;
        if (groups[current].has_property) throw ParseError(line.number, "ELSET " + elset + " has two *UEL Property blocks");
        block = Block::property;
      } else if (kw.name == "polyhedron faces") {
        current_elset = require(kw, "elset", line.number);
        block = Block::faces;
      } else if (kw.name == "boundary") {
        block = Block::boundary;
      } else if (kw.name == "traction") {
        block = Block::traction;
      } else if (kw.name == "body force") {
        if (m.body_force || body_lines) throw ParseError(line.number, "*Body Force given twice");
        block = Block::body_force;
      } else if (kw.name == "analysis") {
        if (auto it = kw.params.find("method"); it != kw.params.end()) {
          try {
            m.method = parse_method(lower(it->second));
          } catch (const InputError&) {
            throw ParseError(line.number, "unknown method '" + it->second + "'");
          }
        }
        if (auto it = kw.params.find("plane"); it != kw.params.end()) {
          const auto v = lower(it->second);
          if (v == "stress") {
            m.plane = StressState::plane_stress;
          } else if (v == "strain") {
            m.plane = StressState::plane_strain;
          } else {
            throw ParseError(line.number, "plane must be STRESS or STRAIN, got '" + it->second + "'");
          }
        }
        block = Block::analysis;
      } else {
        throw ParseError(line.number, "unknown keyword *" + kw.name);
      }
      continue;
    }

    const auto f = data_fields(line);
    const int ln = line.number;
    ++block_rows;
    switch (block) {
      case Block::none:
        throw ParseError(ln, "data line before any keyword");
      case Block::analysis:
        throw ParseError(ln, "*Analysis takes no data lines");
      case Block::node: {
        if (f.size() != 3 && f.size() != 4) throw ParseError(ln, "node line needs an id and 2 or 3 coordinates");
        const int id = to_int(f[0], ln);
        if (!node_ids.insert(id).second) throw ParseError(ln, "duplicate node " + std::to_string(id));
        std::vector<double> x;
        for (std::size_t i = 1; i < f.size(); ++i) x.push_back(to_real(f[i], ln));
        raw_nodes.emplace_back(id, std::move(x));
        raw_node_lines.push_back(ln);
        break;
      }
      case Block::user_element: {
        if (block_rows > 1) throw ParseError(ln, "*User element takes a single dof line");
        std::vector<std::string> expect;
        for (int i = 1; i <= declared_dim; ++i) expect.push_back(std::to_string(i));
        if (f != expect) {
          throw ParseError(ln, "active dofs must be 1.." + std::to_string(declared_dim) + " to match coordinates=");
        }
        break;
      }
      case Block::element: {
        auto& g = groups[current].group;
        if (f.empty()) throw ParseError(ln, "empty element line");
        const int id = to_int(f[0], ln);
        const int count = static_cast<int>(f.size()) - 1;
        if (count != g.node_count) {
          throw ParseError(ln, "element " + std::to_string(id) + " has " + std::to_string(count) + " nodes but " +
                                   g.label() + " declares nodes=" + std::to_string(g.node_count));
        }
        if (element_at.count(id)) throw ParseError(ln, "duplicate element " + std::to_string(id));
        InpElement el;
        el.id = id;
        for (int i = 1; i <= count; ++i) el.nodes.push_back(to_int(f[i], ln));
        element_at[id] = {current, g.elements.size()};
        g.elements.push_back(std::move(el));
        break;
      }
      case Block::property: {
        if (block_rows > 1) throw ParseError(ln, "*UEL Property takes a single line");
        if (f.size() != 2) throw ParseError(ln, "*UEL Property needs E and nu");
        auto& g = groups[current];
        g.group.E = to_real(f[0], ln);
        g.group.nu = to_real(f[1], ln);
        if (!(g.group.E > 0.0)) throw ParseError(ln, "Young's modulus must be positive");
        if (!(g.group.nu > 0.0 && g.group.nu < 0.5)) throw ParseError(ln, "Poisson's ratio must lie in (0, 0.5)");
        g.has_property = true;
        break;
      }
      case Block::faces: {
        std::vector<int> ids;
        for (const auto& s : f) ids.push_back(to_int(s, ln));
        if (ids.size() < 4) throw ParseError(ln, "face line needs an element id and at least 3 nodes");
        face_records.push_back({ln, current_elset, std::move(ids)});
        break;
      }
      case Block::boundary: {
        if (f.size() < 2 || f.size() > 4) throw ParseError(ln, "*Boundary line is node, first dof[, last dof[, value]]");
        const int node = to_int(f[0], ln);
        const int first = to_int(f[1], ln);
        const int last = f.size() >= 3 && !f[2].empty() ? to_int(f[2], ln) : first;
        const double value = f.size() == 4 ? to_real(f[3], ln) : 0.0;
        if (first < 1 || last < first || last > 3) throw ParseError(ln, "invalid dof range");
        for (int d = first; d <= last; ++d) m.boundary.push_back({node, d, value});
        break;
      }
      case Block::traction: {
        if (f.size() != 4 && f.size() != 5) throw ParseError(ln, "*Traction line is element, facet, t1, t2[, t3]");
        InpTraction t;
        t.element = to_int(f[0], ln);
        t.facet = to_int(f[1], ln);
        for (std::size_t i = 2; i < f.size(); ++i) t.t[static_cast<Eigen::Index>(i - 2)] = to_real(f[i], ln);
        m.tractions.push_back(t);
        break;
      }
      case Block::body_force: {
        if (block_rows > 1) throw ParseError(ln, "*Body Force takes a single line");
        if (f.size() != 2 && f.size() != 3) throw ParseError(ln, "*Body Force needs 2 or 3 components");
        Vec3 b = Vec3::Zero();
        for (std::size_t i = 0; i < f.size(); ++i) b[static_cast<Eigen::Index>(i)] = to_real(f[i], ln);
        m.body_force = b;
        ++body_lines;
        break;
      }
    }
  }
  close_block();

  if (declared_dim == 0) {
    declared_dim = raw_nodes.empty() ? 2 : static_cast<int>(raw_nodes.front().second.size());
  }
  m.dim = declared_dim;
  for (std::size_t i = 0; i < raw_nodes.size(); ++i) {
    const auto& [id, x] = raw_nodes[i];
    if (static_cast<int>(x.size()) != m.dim) {
      throw ParseError(raw_node_lines[i], "node " + std::to_string(id) + " has " + std::to_string(x.size()) +
                                              " coordinates, expected " + std::to_string(m.dim));
    }
    InpNode n{id, Vec3::Zero()};
    for (int k = 0; k < m.dim; ++k) n.x[k] = x[static_cast<std::size_t>(k)];
    m.nodes.push_back(n);
  }

  for (const auto& rec : face_records) {
    const auto it = element_at.find(rec.fields[0]);
    if (it == element_at.end()) throw ParseError(rec.line, "faces for unknown element " + std::to_string(rec.fields[0]));
    auto& g = groups[it->second.first].group;
    if (g.elset != rec.elset) {
      throw ParseError(rec.line, "element " + std::to_string(rec.fields[0]) + " is not in ELSET " + rec.elset);
    }
    auto& el = g.elements[it->second.second];
    const std::set<int> own(el.nodes.begin(), el.nodes.end());
    std::vector<int> face(rec.fields.begin() + 1, rec.fields.end());
    for (int v : face) {
      if (!own.count(v)) {
        throw ParseError(rec.line, "face of element " + std::to_string(el.id) + " uses node " + std::to_string(v) +
                                       " outside the element");
      }
    }
    el.faces.push_back(std::move(face));
  }
  if (m.body_force && m.dim == 2 && (*m.body_force)[2] != 0.0) throw InputError("2D body force with a z component");

  for (auto& g : groups) {
    if (g.element_line == 0) {
      m.warnings.push_back("line " + std::to_string(g.declared_line) + ": user element " + g.group.label() +
                           " has no *Element block");
    } else if (!g.has_property) {
      throw ParseError(g.element_line, "no *UEL Property for ELSET " + g.group.elset);
    }
    if (m.dim == 3) {
      for (const auto& el : g.group.elements) {
        if (el.faces.empty()) {
          throw ParseError(g.element_line, "3D element " + std::to_string(el.id) + " has no *Polyhedron Faces entry");
        }
      }
    }
    m.groups.push_back(std::move(g.group));
  }
  return m;
}

namespace {

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Writes comma-separated fields, at most 16 per physical line; a trailing
// comma marks continuation.
void write_record(std::ostream& os, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    os << fields[i];
    if (i + 1 == fields.size()) {
      os << '\n';
    } else if ((i + 1) % 16 == 0) {
      os << ",\n";
    } else {
      os << ", ";
    }
  }
}

std::vector<ElementGroup> sorted_groups(std::vector<ElementGroup> g) {
  std::stable_sort(g.begin(), g.end(), [](const auto& a, const auto& b) { return a.node_count > b.node_count; });
  return g;
}

}  // namespace

bool Model::operator==(const Model& o) const {
  return dim == o.dim && nodes == o.nodes && sorted_groups(groups) == sorted_groups(o.groups) &&
         boundary == o.boundary && tractions == o.tractions && body_force == o.body_force && method == o.method &&
         plane == o.plane;
}

std::string write_inp(const Model& model) {
  std::ostringstream os;
  os << "*Analysis, method=" << (model.method == Method::csfem ? "CSFEM" : "PFEM");
  if (model.dim == 2) os << ", plane=" << (model.plane == StressState::plane_strain ? "STRAIN" : "STRESS");
  os << '\n';
  os << "*Node\n";
  for (const auto& n : model.nodes) {
    std::vector<std::string> f{std::to_string(n.id)};
    for (int k = 0; k < model.dim; ++k) f.push_back(fmt(n.x[k]));
    write_record(os, f);
  }
  for (const auto& g : sorted_groups(model.groups)) {
    os << "*User element, nodes=" << g.node_count << ", type=" << g.label() << ", properties=2, coordinates="
       << model.dim << '\n';
    os << (model.dim == 2 ? "1, 2\n" : "1, 2, 3\n");
    if (g.elset.empty()) continue;
    os << "*Element, type=" << g.label() << ", ELSET=" << g.elset << '\n';
    for (const auto& el : g.elements) {
      std::vector<std::string> f{std::to_string(el.id)};
      for (int v : el.nodes) f.push_back(std::to_string(v));
      write_record(os, f);
    }
    if (model.dim == 3 && !g.elements.empty()) {
      os << "*Polyhedron Faces, ELSET=" << g.elset << '\n';
      for (const auto& el : g.elements) {
        for (const auto& face : el.faces) {
          std::vector<std::string> f{std::to_string(el.id)};
          for (int v : face) f.push_back(std::to_string(v));
          write_record(os, f);
        }
      }
    }
    os << "*UEL Property, ELSET=" << g.elset << '\n' << fmt(g.E) << ", " << fmt(g.nu) << '\n';
  }
  if (!model.boundary.empty()) {
    os << "*Boundary\n";
    for (const auto& b : model.boundary) {
      write_record(os, {std::to_string(b.node), std::to_string(b.dof), std::to_string(b.dof), fmt(b.value)});
    }
  }
  if (!model.tractions.empty()) {
    os << "*Traction\n";
    for (const auto& t : model.tractions) {
      std::vector<std::string> f{std::to_string(t.element), std::to_string(t.facet)};
      for (int k = 0; k < model.dim; ++k) f.push_back(fmt(t.t[k]));
      write_record(os, f);
    }
  }
  if (model.body_force) {
    os << "*Body Force\n";
    std::vector<std::string> f;
    for (int k = 0; k < model.dim; ++k) f.push_back(fmt((*model.body_force)[k]));
    write_record(os, f);
  }
  return os.str();
}

Model make_model(const Mesh& mesh, double E, double nu, Method method, StressState plane) {
  Model m;
  m.dim = mesh.dim();
  m.method = method;
  m.plane = mesh.dim() == 2 ? plane : StressState::plane_stress;
  for (std::size_t i = 0; i < mesh.node_count(); ++i) m.nodes.push_back({static_cast<int>(i) + 1, mesh.node(i)});
  std::map<int, ElementGroup, std::greater<>> by_count;
  for (std::size_t e = 0; e < mesh.element_count(); ++e) {
    const auto& el = mesh.element(e);
    const int n = static_cast<int>(el.vertices.size());
    auto& g = by_count[n];
    g.node_count = n;
    g.elset = "poly" + std::to_string(n);
    g.E = E;
    g.nu = nu;
    InpElement rec;
    rec.id = static_cast<int>(e) + 1;
    for (int v : el.vertices) rec.nodes.push_back(v + 1);
    for (const auto& f : el.faces) {
      std::vector<int> ids;
      for (int v : f) ids.push_back(v + 1);
      rec.faces.push_back(std::move(ids));
    }
    g.elements.push_back(std::move(rec));
  }
  for (auto& [n, g] : by_count) m.groups.push_back(std::move(g));
  return m;
}

namespace {

std::vector<std::pair<const InpElement*, const ElementGroup*>> ordered_elements(const Model& model) {
  std::vector<std::pair<const InpElement*, const ElementGroup*>> out;
  for (const auto& g : model.groups) {
    for (const auto& el : g.elements) out.emplace_back(&el, &g);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first->id < b.first->id; });
  return out;
}

}  // namespace

Mesh to_mesh(const Model& model) {
  std::map<int, int> index;
  std::vector<Vec3> nodes;
  for (const auto& n : model.nodes) {
    index[n.id] = static_cast<int>(nodes.size());
    nodes.push_back(n.x);
  }
  auto lookup = [&](int id, int element) {
    const auto it = index.find(id);
    if (it == index.end()) {
      throw InputError("element " + std::to_string(element) + " references undefined node " + std::to_string(id));
    }
    return it->second;
  };
  std::vector<PolyElement> elements;
  for (const auto& [el, g] : ordered_elements(model)) {
    PolyElement pe;
    for (int v : el->nodes) pe.vertices.push_back(lookup(v, el->id));
    for (const auto& f : el->faces) {
      std::vector<int> loop;
      for (int v : f) loop.push_back(lookup(v, el->id));
      pe.faces.push_back(std::move(loop));
    }
    elements.push_back(std::move(pe));
  }
  return Mesh(model.dim, std::move(nodes), std::move(elements));
}

std::vector<Material> element_materials(const Model& model) {
  const StressState state = model.dim == 3 ? StressState::solid : model.plane;
  std::vector<Material> out;
  for (const auto& [el, g] : ordered_elements(model)) out.push_back({g->E, g->nu, state});
  return out;
}

std::vector<int> element_ids(const Model& model) {
  std::vector<int> out;
  for (const auto& [el, g] : ordered_elements(model)) out.push_back(el->id);
  return out;
}

}  // namespace sfem
