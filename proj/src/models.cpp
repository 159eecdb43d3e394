#include "vlam/models.hpp"

#include <map>
#include <mutex>
#include <set>
#include <sstream>

#include "vlam/error.hpp"

namespace vlam {

std::string backend_name(Backend b) { return b == Backend::FinMet ? "finmet" : "finmeas"; }

// ---------------------------------------------------------------------------
// Points and matrices.

Point MetPoint::ground(std::size_t i) {
  return std::make_shared<const MetPoint>(MetPoint{Kind::Ground, i, nullptr, nullptr, nullptr});
}

Point MetPoint::unit() {
  static const Point u = std::make_shared<const MetPoint>(MetPoint{Kind::Unit, 0, nullptr, nullptr, nullptr});
  return u;
}

Point MetPoint::pair(Point a, Point b) {
  return std::make_shared<const MetPoint>(MetPoint{Kind::Pair, 0, std::move(a), std::move(b), nullptr});
}

Point MetPoint::fun(PointMap f) {
  return std::make_shared<const MetPoint>(MetPoint{Kind::Fun, 0, nullptr, nullptr, std::move(f)});
}

RatMatrix::RatMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(cols) {}

RatMatrix RatMatrix::identity(std::size_t n) {
  RatMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

Rational& RatMatrix::at(std::size_t r, std::size_t c) {
  if (r >= rows_ || c >= cols_) throw ModelError("matrix index out of range");
  return data_[c][r];
}

const Rational& RatMatrix::at(std::size_t r, std::size_t c) const {
  static const Rational zero = 0;
  if (r >= rows_ || c >= cols_) throw ModelError("matrix index out of range");
  auto it = data_[c].find(r);
  return it == data_[c].end() ? zero : it->second;
}

namespace {

bool same_column(const RatMatrix::Column& a, const RatMatrix::Column& b) {
  for (const auto& [r, x] : a) {
    auto it = b.find(r);
    if (x != (it == b.end() ? Rational(0) : it->second)) return false;
  }
  for (const auto& [r, x] : b) {
    if (x != 0 && !a.count(r)) return false;
  }
  return true;
}

}  // namespace

bool operator==(const RatMatrix& a, const RatMatrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) return false;
  for (std::size_t j = 0; j < a.cols_; ++j) {
    if (!same_column(a.data_[j], b.data_[j])) return false;
  }
  return true;
}

RatMatrix operator*(const RatMatrix& a, const RatMatrix& b) {
  if (a.cols() != b.rows()) throw ModelError("matrix dimensions do not compose");
  RatMatrix c(a.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    for (const auto& [k, y] : b.column(j)) {
      if (y == 0) continue;
      for (const auto& [i, x] : a.column(k)) {
        if (x != 0) c.at(i, j) += x * y;
      }
    }
  }
  return c;
}

RatMatrix operator-(const RatMatrix& a, const RatMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ModelError("matrix dimensions differ");
  RatMatrix c(a.rows(), a.cols());
  for (std::size_t j = 0; j < a.cols(); ++j) {
    for (const auto& [i, x] : a.column(j)) c.at(i, j) += x;
    for (const auto& [i, y] : b.column(j)) c.at(i, j) -= y;
  }
  return c;
}

RatMatrix kronecker(const RatMatrix& a, const RatMatrix& b) {
  RatMatrix c(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t j = 0; j < a.cols(); ++j) {
    for (std::size_t l = 0; l < b.cols(); ++l) {
      for (const auto& [i, x] : a.column(j)) {
        if (x == 0) continue;
        for (const auto& [k, y] : b.column(l)) {
          if (y != 0) c.at(i * b.rows() + k, j * b.cols() + l) = x * y;
        }
      }
    }
  }
  return c;
}

Rational l1_operator_norm(const RatMatrix& m) {
  Rational best = 0;
  for (std::size_t j = 0; j < m.cols(); ++j) {
    Rational s = 0;
    for (const auto& [i, x] : m.column(j)) s += abs(x);
    if (s > best) best = s;
  }
  return best;
}

Rational event_sup_norm(const RatMatrix& m) {
  Rational best = 0;
  for (std::size_t j = 0; j < m.cols(); ++j) {
    Rational pos = 0, neg = 0;
    for (const auto& [i, x] : m.column(j)) {
      if (x > 0) pos += x;
      if (x < 0) neg -= x;
    }
    best = std::max({best, pos, neg});
  }
  return best;
}

// ---------------------------------------------------------------------------
// Shapes.

Shape Shape::unit() { return Shape{}; }

Shape Shape::leaf(std::string label, Type type) { return Shape{Kind::Leaf, std::move(label), std::move(type), {}}; }

Shape Shape::tensor(Shape a, Shape b) {
  Shape s;
  s.kind = Kind::Tensor;
  s.children = {std::move(a), std::move(b)};
  return s;
}

Shape Shape::tensor_all(std::vector<Shape> parts) {
  if (parts.empty()) return unit();
  Shape acc = std::move(parts[0]);
  for (std::size_t i = 1; i < parts.size(); ++i) acc = tensor(std::move(acc), std::move(parts[i]));
  return acc;
}

Shape Shape::context(const Context& ctx) {
  std::vector<Shape> leaves;
  for (const auto& [x, a] : ctx.entries()) leaves.push_back(leaf(x, a));
  return tensor_all(std::move(leaves));
}

Type Shape::object() const {
  switch (kind) {
    case Kind::Unit: return Type::unit();
    case Kind::Leaf: return *type;
    case Kind::Tensor: return Type::tensor(children[0].object(), children[1].object());
  }
  return Type::unit();
}

Type context_object(const Context& ctx) { return Shape::context(ctx).object(); }

// ---------------------------------------------------------------------------
// The model.

namespace {

struct Carrier {
  std::vector<Point> points;
  /// Function types: the enumerated tables and their lookup.
  std::shared_ptr<const HomCarrier> hom;
};

}  // namespace

struct Model::Impl {
  Backend backend = Backend::FinMet;
  QuantaleSpec spec = QuantaleSpec::lawvere();
  std::map<std::string, std::shared_ptr<const FinVCat>> met_ground;
  std::map<std::string, std::vector<Rational>> meas_ground;
  struct Op {
    OpSig sig;
    PointMap map;
    std::shared_ptr<const RatMatrix> matrix;
  };
  std::map<std::string, Op> ops;

  mutable std::recursive_mutex mu;
  mutable std::map<std::string, std::shared_ptr<const Carrier>> carriers;
  mutable std::map<std::string, std::shared_ptr<const FinVCat>> vcats;

  void require(Backend b, const char* what) const {
    if (backend != b) throw ModelError(std::string(what) + " is not available in the " + backend_name(backend) + " backend");
  }
};

Model::Model(std::shared_ptr<Impl> impl) : impl_(std::move(impl)) {}

Model Model::finmet(QuantaleSpec spec) {
  auto i = std::make_shared<Impl>();
  i->backend = Backend::FinMet;
  i->spec = spec;
  return Model(i);
}

Model Model::finmeas() {
  auto i = std::make_shared<Impl>();
  i->backend = Backend::FinMeas;
  i->spec = QuantaleSpec::lawvere();
  return Model(i);
}

Backend Model::backend() const { return impl_->backend; }
QuantaleSpec Model::quantale() const { return impl_->spec; }

void Model::set_ground(const std::string& name, std::shared_ptr<const FinVCat> carrier) {
  impl_->require(Backend::FinMet, "a V-category carrier");
  if (!(carrier->spec() == impl_->spec)) throw SpecMismatch("carrier of '" + name + "' uses another quantale");
  if (carrier->size() == 0) throw ModelError("carrier of '" + name + "' is empty");
  impl_->met_ground[name] = std::move(carrier);
  std::lock_guard lock(impl_->mu);
  impl_->carriers.clear();
  impl_->vcats.clear();
}

void Model::set_ground(const std::string& name, std::vector<Rational> points) {
  impl_->require(Backend::FinMeas, "a measure-space basis");
  if (points.empty()) throw ModelError("basis of '" + name + "' is empty");
  impl_->meas_ground[name] = std::move(points);
}

void Model::set_operation(const std::string& name, const OpSig& sig, PointMap map) {
  impl_->require(Backend::FinMet, "a point map");
  impl_->ops.insert_or_assign(name, Impl::Op{sig, std::move(map), nullptr});
}

void Model::set_operation(const std::string& name, const OpSig& sig, RatMatrix matrix) {
  impl_->require(Backend::FinMeas, "a matrix");
  std::vector<Type> args = sig.args;
  Type source = Type::unit();
  if (!args.empty()) {
    source = args[0];
    for (std::size_t i = 1; i < args.size(); ++i) source = Type::tensor(source, args[i]);
  }
  if (matrix.cols() != dimension(source) || matrix.rows() != dimension(sig.result)) {
    throw ModelError("matrix for '" + name + "' has the wrong dimensions");
  }
  for (std::size_t j = 0; j < matrix.cols(); ++j) {
    Rational s = 0;
    for (const auto& [i, x] : matrix.column(j)) s += abs(x);
    if (s > 1) throw ModelError("matrix for '" + name + "' is not short: column " + std::to_string(j) + " has norm " + to_string(s));
  }
  impl_->ops.insert_or_assign(name, Impl::Op{sig, nullptr, std::make_shared<const RatMatrix>(std::move(matrix))});
}

bool Model::interprets_ground(const std::string& name) const {
  return impl_->met_ground.count(name) || impl_->meas_ground.count(name);
}

bool Model::interprets(const std::string& op) const { return impl_->ops.count(op) > 0; }

std::vector<std::string> Model::uninterpreted(const Term& t) const {
  std::set<std::string> out;
  std::function<void(const Term&)> go = [&](const Term& u) {
    if (u.kind() == Term::Kind::Op && !interprets(u.name())) out.insert(u.name());
    for (const auto& c : u.children()) go(c);
  };
  go(t);
  return {out.begin(), out.end()};
}

std::shared_ptr<const FinVCat> Model::ground_vcat(const std::string& name) const {
  auto it = impl_->met_ground.find(name);
  if (it == impl_->met_ground.end()) throw ModelError("ground type '" + name + "' is not interpreted");
  return it->second;
}

const std::vector<Rational>& Model::ground_points(const std::string& name) const {
  auto it = impl_->meas_ground.find(name);
  if (it == impl_->meas_ground.end()) throw ModelError("ground type '" + name + "' is not interpreted");
  return it->second;
}

// Objects ---------------------------------------------------------------------

const std::vector<Point>& Model::carrier(const Type& a, std::size_t limit) const {
  impl_->require(Backend::FinMet, "point enumeration");
  std::string key = a.to_string();
  {
    std::lock_guard lock(impl_->mu);
    if (auto it = impl_->carriers.find(key); it != impl_->carriers.end()) return it->second->points;
  }
  auto c = std::make_shared<Carrier>();
  switch (a.kind()) {
    case Type::Kind::Ground: {
      auto v = ground_vcat(a.name());
      for (std::size_t i = 0; i < v->size(); ++i) c->points.push_back(MetPoint::ground(i));
      break;
    }
    case Type::Kind::Unit: c->points.push_back(MetPoint::unit()); break;
    case Type::Kind::Tensor: {
      const auto& l = carrier(a.left(), limit);
      const auto& r = carrier(a.right(), limit);
      if (l.size() * r.size() > limit) throw LimitExceeded("carrier of " + a.to_string() + " is too large");
      for (const auto& p : l) {
        for (const auto& q : r) c->points.push_back(MetPoint::pair(p, q));
      }
      break;
    }
    case Type::Kind::Lolli: {
      // Count before building any distance table.
      double tables = 1;
      std::size_t nd = carrier(a.left(), limit).size(), nc = carrier(a.right(), limit).size();
      for (std::size_t i = 0; i < nd && tables <= static_cast<double>(limit); ++i) tables *= static_cast<double>(nc);
      if (tables > static_cast<double>(limit)) throw LimitExceeded("carrier of " + a.to_string() + " is too large");
      auto dom = object_vcat(a.left(), limit);
      auto cod = object_vcat(a.right(), limit);
      auto hom = std::make_shared<HomCarrier>(enumerate_hom(*dom, *cod, limit));
      auto targets = std::make_shared<const std::vector<Point>>(carrier(a.right(), limit));
      std::weak_ptr<Impl> self = impl_;
      Type left = a.left();
      for (const auto& table : hom->tables) {
        MetPoint f{MetPoint::Kind::Fun, c->points.size(), nullptr, nullptr,
                   [self, left, table, targets](const Point& x) {
                     auto impl = self.lock();
                     if (!impl) throw ModelError("a function point outlived its model");
                     return (*targets)[table[Model(impl).index_of(left, x)]];
                   },
                   true};
        c->points.push_back(std::make_shared<const MetPoint>(std::move(f)));
      }
      c->hom = hom;
      break;
    }
  }
  std::lock_guard lock(impl_->mu);
  auto [it, inserted] = impl_->carriers.emplace(key, c);
  return it->second->points;
}

std::size_t Model::index_of(const Type& a, const Point& p) const {
  switch (a.kind()) {
    case Type::Kind::Ground: return p->index;
    case Type::Kind::Unit: return 0;
    case Type::Kind::Tensor: return index_of(a.left(), p->left) * carrier(a.right()).size() + index_of(a.right(), p->right);
    case Type::Kind::Lolli: {
      if (p->enumerated) return p->index;
      std::vector<std::size_t> table;
      for (const auto& x : carrier(a.left())) table.push_back(index_of(a.right(), p->fn(x)));
      carrier(a);
      std::lock_guard lock(impl_->mu);
      const auto& index = impl_->carriers.at(a.to_string())->hom->index;
      auto it = index.find(table);
      if (it == index.end()) throw ModelError("function point is not a non-expansive map");
      return it->second;
    }
  }
  throw ModelError("unreachable");
}

std::shared_ptr<const FinVCat> Model::object_vcat(const Type& a, std::size_t limit) const {
  impl_->require(Backend::FinMet, "a V-category object");
  std::string key = a.to_string();
  {
    std::lock_guard lock(impl_->mu);
    if (auto it = impl_->vcats.find(key); it != impl_->vcats.end()) return it->second;
  }
  std::shared_ptr<const FinVCat> v;
  switch (a.kind()) {
    case Type::Kind::Ground: v = ground_vcat(a.name()); break;
    case Type::Kind::Unit: v = std::make_shared<const FinVCat>(FinVCat::unit(impl_->spec)); break;
    case Type::Kind::Tensor:
      v = std::make_shared<const FinVCat>(tensor_vcat(*object_vcat(a.left(), limit), *object_vcat(a.right(), limit)));
      break;
    case Type::Kind::Lolli: {
      carrier(a, limit);
      std::lock_guard lock(impl_->mu);
      v = impl_->carriers.at(key)->hom->category;
      break;
    }
  }
  std::lock_guard lock(impl_->mu);
  impl_->vcats.emplace(key, v);
  return v;
}

QuantaleValue Model::point_distance(const Type& a, const Point& p, const Point& q) const {
  switch (a.kind()) {
    case Type::Kind::Ground: return ground_vcat(a.name())->at(p->index, q->index);
    case Type::Kind::Unit: return impl_->spec.top();
    case Type::Kind::Tensor:
      return vlam::tensor(point_distance(a.left(), p->left, q->left), point_distance(a.right(), p->right, q->right));
    case Type::Kind::Lolli: {
      QuantaleValue d = impl_->spec.top();
      for (const auto& x : carrier(a.left())) {
        d = meet(d, point_distance(a.right(), p->fn(x), q->fn(x)));
        if (d.is_bottom()) break;
      }
      return d;
    }
  }
  throw ModelError("unreachable");
}

bool Model::point_equal(const Type& a, const Point& p, const Point& q) const {
  switch (a.kind()) {
    case Type::Kind::Ground: return p->index == q->index;
    case Type::Kind::Unit: return true;
    case Type::Kind::Tensor: return point_equal(a.left(), p->left, q->left) && point_equal(a.right(), p->right, q->right);
    case Type::Kind::Lolli:
      for (const auto& x : carrier(a.left())) {
        if (!point_equal(a.right(), p->fn(x), q->fn(x))) return false;
      }
      return true;
  }
  return false;
}

std::string Model::point_to_string(const Type& a, const Point& p) const {
  switch (a.kind()) {
    case Type::Kind::Ground: return ground_vcat(a.name())->carrier()[p->index];
    case Type::Kind::Unit: return "*";
    case Type::Kind::Tensor:
      return "(" + point_to_string(a.left(), p->left) + ", " + point_to_string(a.right(), p->right) + ")";
    case Type::Kind::Lolli: {
      std::string s = "{";
      bool first = true;
      for (const auto& x : carrier(a.left())) {
        s += (first ? "" : ", ") + point_to_string(a.left(), x) + " -> " + point_to_string(a.right(), p->fn(x));
        first = false;
      }
      return s + "}";
    }
  }
  return "?";
}

std::size_t Model::dimension(const Type& a) const {
  impl_->require(Backend::FinMeas, "dimension");
  switch (a.kind()) {
    case Type::Kind::Ground: return ground_points(a.name()).size();
    case Type::Kind::Unit: return 1;
    case Type::Kind::Tensor: return dimension(a.left()) * dimension(a.right());
    case Type::Kind::Lolli: return dimension(a.left()) * dimension(a.right());
  }
  return 0;
}

// Autonomous structure ----------------------------------------------------------

namespace {

void require_type(const Type& want, const Type& got, const char* what) {
  if (!(want == got)) {
    throw ModelError(std::string(what) + ": expected " + want.to_string() + " but got " + got.to_string());
  }
}

}  // namespace

Morphism Model::identity(const Type& a) const {
  if (backend() == Backend::FinMet) return {a, a, [](const Point& p) { return p; }, nullptr};
  return {a, a, nullptr, std::make_shared<const RatMatrix>(RatMatrix::identity(dimension(a)))};
}

Morphism Model::compose(const Morphism& g, const Morphism& f) const {
  require_type(g.source, f.target, "composition");
  if (backend() == Backend::FinMet) {
    return tabulate({f.source, g.target, [gm = g.map, fm = f.map](const Point& p) { return gm(fm(p)); }, nullptr});
  }
  return {f.source, g.target, nullptr, std::make_shared<const RatMatrix>(*g.matrix * *f.matrix)};
}

Morphism Model::tensor(const Morphism& f, const Morphism& g) const {
  Type s = Type::tensor(f.source, g.source), t = Type::tensor(f.target, g.target);
  if (backend() == Backend::FinMet) {
    return {s, t,
            [fm = f.map, gm = g.map](const Point& p) { return MetPoint::pair(fm(p->left), gm(p->right)); },
            nullptr};
  }
  return {s, t, nullptr, std::make_shared<const RatMatrix>(kronecker(*f.matrix, *g.matrix))};
}

Morphism Model::tensor_all(const std::vector<Morphism>& fs) const {
  if (fs.empty()) return identity(Type::unit());
  Morphism acc = fs[0];
  for (std::size_t i = 1; i < fs.size(); ++i) acc = tensor(acc, fs[i]);
  return acc;
}

Morphism Model::curry(const Morphism& f) const {
  if (f.source.kind() != Type::Kind::Tensor) throw ModelError("curry needs a map out of a tensor");
  const Type& g = f.source.left();
  const Type& a = f.source.right();
  Type hom = Type::lolli(a, f.target);
  if (backend() == Backend::FinMet) {
    return tabulate({g, hom,
                     [fm = f.map](const Point& x) {
                       return MetPoint::fun([fm, x](const Point& y) { return fm(MetPoint::pair(x, y)); });
                     },
                     nullptr});
  }
  std::size_t dg = dimension(g), da = dimension(a), db = dimension(f.target);
  RatMatrix m(db * da, dg);
  for (std::size_t c = 0; c < dg; ++c) {
    for (std::size_t x = 0; x < da; ++x) {
      for (const auto& [r, v] : f.matrix->column(c * da + x)) {
        if (v != 0) m.at(r * da + x, c) = v;
      }
    }
  }
  return {g, hom, nullptr, std::make_shared<const RatMatrix>(std::move(m))};
}

Morphism Model::eval(const Type& a, const Type& b) const {
  Type s = Type::tensor(Type::lolli(a, b), a);
  if (backend() == Backend::FinMet) {
    return {s, b, [](const Point& p) { return p->left->fn(p->right); }, nullptr};
  }
  std::size_t da = dimension(a), db = dimension(b);
  RatMatrix m(db, db * da * da);
  for (std::size_t r = 0; r < db; ++r) {
    for (std::size_t x = 0; x < da; ++x) m.at(r, (r * da + x) * da + x) = 1;
  }
  return {s, b, nullptr, std::make_shared<const RatMatrix>(std::move(m))};
}

Morphism Model::operation(const std::string& name) const {
  auto it = impl_->ops.find(name);
  if (it == impl_->ops.end()) throw ModelError("operation '" + name + "' is not interpreted");
  const auto& op = it->second;
  Type source = Type::unit();
  if (!op.sig.args.empty()) {
    source = op.sig.args[0];
    for (std::size_t i = 1; i < op.sig.args.size(); ++i) source = Type::tensor(source, op.sig.args[i]);
  }
  return {source, op.sig.result, op.map, op.matrix};
}

namespace {

void collect_leaves(const Shape& s, std::vector<std::string>& out) {
  if (s.kind == Shape::Kind::Leaf) out.push_back(s.label);
  for (const auto& c : s.children) collect_leaves(c, out);
}

void read_points(const Shape& s, const Point& p, std::map<std::string, Point>& out) {
  switch (s.kind) {
    case Shape::Kind::Unit: return;
    case Shape::Kind::Leaf: out[s.label] = p; return;
    case Shape::Kind::Tensor:
      read_points(s.children[0], p->left, out);
      read_points(s.children[1], p->right, out);
      return;
  }
}

Point build_point(const Shape& s, const std::map<std::string, Point>& in) {
  switch (s.kind) {
    case Shape::Kind::Unit: return MetPoint::unit();
    case Shape::Kind::Leaf: return in.at(s.label);
    case Shape::Kind::Tensor: return MetPoint::pair(build_point(s.children[0], in), build_point(s.children[1], in));
  }
  return nullptr;
}

std::size_t shape_dim(const Model& m, const Shape& s) {
  switch (s.kind) {
    case Shape::Kind::Unit: return 1;
    case Shape::Kind::Leaf: return m.dimension(*s.type);
    case Shape::Kind::Tensor: return shape_dim(m, s.children[0]) * shape_dim(m, s.children[1]);
  }
  return 1;
}

// Digits of a basis index, per leaf.
void read_digits(const Model& m, const Shape& s, std::size_t index, std::map<std::string, std::size_t>& out) {
  switch (s.kind) {
    case Shape::Kind::Unit: return;
    case Shape::Kind::Leaf: out[s.label] = index; return;
    case Shape::Kind::Tensor: {
      std::size_t r = shape_dim(m, s.children[1]);
      read_digits(m, s.children[0], index / r, out);
      read_digits(m, s.children[1], index % r, out);
      return;
    }
  }
}

std::size_t build_index(const Model& m, const Shape& s, const std::map<std::string, std::size_t>& in) {
  switch (s.kind) {
    case Shape::Kind::Unit: return 0;
    case Shape::Kind::Leaf: return in.at(s.label);
    case Shape::Kind::Tensor:
      return build_index(m, s.children[0], in) * shape_dim(m, s.children[1]) + build_index(m, s.children[1], in);
  }
  return 0;
}

}  // namespace

Morphism Model::rearrange(const Shape& from, const Shape& to) const {
  std::vector<std::string> a, b;
  collect_leaves(from, a);
  collect_leaves(to, b);
  std::multiset<std::string> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  if (sa != sb || sa.size() != a.size() || std::set<std::string>(a.begin(), a.end()).size() != a.size()) {
    throw ModelError("shapes do not have the same leaves");
  }
  Type s = from.object(), t = to.object();
  if (backend() == Backend::FinMet) {
    return {s, t,
            [from, to](const Point& p) {
              std::map<std::string, Point> leaves;
              read_points(from, p, leaves);
              return build_point(to, leaves);
            },
            nullptr};
  }
  std::size_t n = shape_dim(*this, from);
  RatMatrix m(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    std::map<std::string, std::size_t> digits;
    read_digits(*this, from, j, digits);
    m.at(build_index(*this, to, digits), j) = 1;
  }
  return {s, t, nullptr, std::make_shared<const RatMatrix>(std::move(m))};
}

Morphism Model::tabulate(const Morphism& f) const {
  if (backend() == Backend::FinMeas) return f;
  const auto& src = carrier(f.source);
  auto targets = std::make_shared<const std::vector<Point>>(carrier(f.target));
  std::vector<std::size_t> table;
  table.reserve(src.size());
  for (const auto& p : src) table.push_back(index_of(f.target, f.map(p)));
  std::weak_ptr<Impl> self = impl_;
  Type s = f.source;
  return {f.source, f.target,
          [self, s, table = std::move(table), targets](const Point& p) {
            auto impl = self.lock();
            if (!impl) throw ModelError("a map outlived its model");
            return (*targets)[table[Model(impl).index_of(s, p)]];
          },
          nullptr};
}

bool Model::equal(const Morphism& f, const Morphism& g) const {
  require_type(f.source, g.source, "comparison");
  require_type(f.target, g.target, "comparison");
  if (backend() == Backend::FinMeas) return *f.matrix == *g.matrix;
  for (const auto& p : carrier(f.source)) {
    if (!point_equal(f.target, f.map(p), g.map(p))) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Housekeeping.

namespace {

std::vector<Context::Entry> concat_entries(const std::vector<Context>& parts) {
  std::vector<Context::Entry> all;
  for (const auto& p : parts) all.insert(all.end(), p.entries().begin(), p.entries().end());
  return all;
}

}  // namespace

Morphism split(const Model& m, const std::vector<Context>& parts) {
  std::vector<Shape> shapes;
  for (const auto& p : parts) shapes.push_back(Shape::context(p));
  return m.rearrange(Shape::context(Context(concat_entries(parts))), Shape::tensor_all(std::move(shapes)));
}

Morphism join(const Model& m, const std::vector<Context>& parts) {
  std::vector<Shape> shapes;
  for (const auto& p : parts) shapes.push_back(Shape::context(p));
  return m.rearrange(Shape::tensor_all(std::move(shapes)), Shape::context(Context(concat_entries(parts))));
}

Morphism shuffle(const Model& m, const Context& e, const std::vector<Context>& parts) {
  return m.rearrange(Shape::context(e), Shape::context(Context(concat_entries(parts))));
}

Morphism exchange(const Model& m, const Context& g, std::size_t i) {
  return m.rearrange(Shape::context(g), Shape::context(g.exchanged(i)));
}

Morphism left_unitor(const Model& m, const Type& a) {
  return m.rearrange(Shape::tensor(Shape::unit(), Shape::leaf("a", a)), Shape::leaf("a", a));
}

Morphism associator(const Model& m, const Type& a, const Type& b, const Type& c) {
  auto A = Shape::leaf("a", a), B = Shape::leaf("b", b), C = Shape::leaf("c", c);
  return m.rearrange(Shape::tensor(Shape::tensor(A, B), C), Shape::tensor(A, Shape::tensor(B, C)));
}

Morphism associator_inverse(const Model& m, const Type& a, const Type& b, const Type& c) {
  auto A = Shape::leaf("a", a), B = Shape::leaf("b", b), C = Shape::leaf("c", c);
  return m.rearrange(Shape::tensor(A, Shape::tensor(B, C)), Shape::tensor(Shape::tensor(A, B), C));
}

Morphism swap(const Model& m, const Type& a, const Type& b) {
  auto A = Shape::leaf("a", a), B = Shape::leaf("b", b);
  return m.rearrange(Shape::tensor(A, B), Shape::tensor(B, A));
}

}  // namespace vlam
