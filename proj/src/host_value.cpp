#include "plb/host_value.hpp"

#include "plb/reader.hpp"

#include <charconv>
#include <utility>

namespace plb {

namespace {

bool is_container(const HostValue& v) { return v.is<Sequence>() || v.is<Record>(); }

std::vector<HostValue>* children(HostValue& v) {
  if (v.is<Sequence>()) return &v.as<Sequence>();
  if (v.is<Record>()) return &v.as<Record>().fields;
  return nullptr;
}

const std::vector<HostValue>* children(const HostValue& v) {
  if (v.is<Sequence>()) return &v.as<Sequence>();
  if (v.is<Record>()) return &v.as<Record>().fields;
  return nullptr;
}

}  // namespace

HostValue::HostValue(const HostValue& other) {
  std::vector<std::pair<const HostValue*, HostValue*>> stack{{&other, this}};
  while (!stack.empty()) {
    auto [src, dst] = stack.back();
    stack.pop_back();
    if (src->is<Sequence>()) {
      const auto& from = src->as<Sequence>();
      dst->v_ = Sequence(from.size());
      auto& to = dst->as<Sequence>();
      for (std::size_t i = 0; i < from.size(); ++i) stack.emplace_back(&from[i], &to[i]);
    } else if (src->is<Record>()) {
      const auto& from = src->as<Record>();
      dst->v_ = Record{from.name, std::vector<HostValue>(from.fields.size())};
      auto& to = dst->as<Record>().fields;
      for (std::size_t i = 0; i < from.fields.size(); ++i) stack.emplace_back(&from.fields[i], &to[i]);
    } else {
      dst->v_ = src->v_;
    }
  }
}

HostValue& HostValue::operator=(const HostValue& other) {
  if (this != &other) {
    HostValue copy(other);
    *this = std::move(copy);
  }
  return *this;
}

HostValue::~HostValue() {
  auto* kids = children(*this);
  if (kids == nullptr) return;
  bool nested = false;
  for (const auto& k : *kids) {
    if (is_container(k)) {
      nested = true;
      break;
    }
  }
  if (!nested) return;

  std::vector<HostValue> pending;
  for (auto& k : *kids) {
    if (is_container(k)) pending.push_back(std::move(k));
  }
  while (!pending.empty()) {
    HostValue v = std::move(pending.back());
    pending.pop_back();
    for (auto& k : *children(v)) {
      if (is_container(k)) pending.push_back(std::move(k));
    }
  }
}

bool operator==(const HostValue& a, const HostValue& b) {
  std::vector<std::pair<const HostValue*, const HostValue*>> stack{{&a, &b}};
  while (!stack.empty()) {
    auto [x, y] = stack.back();
    stack.pop_back();
    if (x->storage().index() != y->storage().index()) return false;
    if (x->is<Record>()) {
      const auto& rx = x->as<Record>();
      const auto& ry = y->as<Record>();
      if (rx.name != ry.name) return false;
    }
    if (const auto* kx = children(*x)) {
      const auto* ky = children(*y);
      if (kx->size() != ky->size()) return false;
      for (std::size_t i = 0; i < kx->size(); ++i) stack.emplace_back(&(*kx)[i], &(*ky)[i]);
      continue;
    }
    bool same = std::visit(
        [&](const auto& lhs) {
          using T = std::decay_t<decltype(lhs)>;
          if constexpr (std::is_same_v<T, Sequence> || std::is_same_v<T, Record>) {
            return true;
          } else {
            return lhs == std::get<T>(y->storage());
          }
        },
        x->storage());
    if (!same) return false;
  }
  return true;
}

HostValue record(std::string name, std::vector<HostValue> fields) {
  return HostValue(Record{std::move(name), std::move(fields)});
}

std::size_t record_spine_depth(const HostValue& v) {
  std::size_t depth = 0;
  const HostValue* p = &v;
  while (p->is<Record>() && !p->as<Record>().fields.empty()) {
    ++depth;
    p = &p->as<Record>().fields.back();
  }
  if (p->is<Record>()) ++depth;
  return depth;
}

std::string to_string(const HostValue& root) {
  // Explicit stack of (value, next child index) so deep values don't recurse.
  std::string out;
  struct Item {
    const HostValue* v;
    std::size_t next;
  };
  std::vector<Item> stack{{&root, 0}};
  while (!stack.empty()) {
    Item& it = stack.back();
    const HostValue& v = *it.v;
    const auto* kids = children(v);
    if (kids == nullptr) {
      std::visit(
          [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, std::int64_t>) {
              out += std::to_string(x);
            } else if constexpr (std::is_same_v<T, double>) {
              char buf[64];
              auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
              out.append(buf, end);
            } else if constexpr (std::is_same_v<T, Symbol>) {
              out += quote_atom_if_needed(x.name);
            } else if constexpr (std::is_same_v<T, OpaqueObject>) {
              out += "<object>";
            } else if constexpr (std::is_same_v<T, OpaqueTerm>) {
              out += x.valid() ? "<term " + x.to_string() + ">" : "<term>";
            }
          },
          v.storage());
      stack.pop_back();
      continue;
    }
    bool seq = v.is<Sequence>();
    if (it.next == 0) {
      if (seq) {
        out += '[';
      } else {
        out += quote_atom_if_needed(v.as<Record>().name);
        if (kids->empty()) {
          stack.pop_back();
          continue;
        }
        out += '(';
      }
    }
    if (it.next == kids->size()) {
      out += seq ? ']' : ')';
      stack.pop_back();
      continue;
    }
    if (it.next > 0) out += ',';
    const HostValue* child = &(*kids)[it.next++];
    stack.push_back({child, 0});
  }
  return out;
}

}  // namespace plb
