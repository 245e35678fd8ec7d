#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace paver {

enum class TypeKind { Int, Bool, Ref, Unit, Fn };

/// A MiniLang value type. Function-reference types carry a signature whose
/// parameter and result kinds are never themselves function types.
struct ValueType {
  TypeKind kind = TypeKind::Unit;
  std::vector<TypeKind> params;
  TypeKind ret = TypeKind::Unit;

  static ValueType of(TypeKind k) { return ValueType{k, {}, TypeKind::Unit}; }
  static ValueType fn(std::vector<TypeKind> params, TypeKind ret) {
    return ValueType{TypeKind::Fn, std::move(params), ret};
  }

  bool is_fn() const { return kind == TypeKind::Fn; }
  bool operator==(const ValueType &) const = default;
};

std::string to_string(TypeKind kind);
std::string to_string(const ValueType &type);

/// A compile-time constant: error-return annotations, mined error values and
/// the values patches return. Bools are stored as 0/1; nil as 0.
struct Constant {
  TypeKind type = TypeKind::Unit;
  std::int64_t value = 0;

  static Constant integer(std::int64_t v) { return {TypeKind::Int, v}; }
  static Constant boolean(bool b) { return {TypeKind::Bool, b ? 1 : 0}; }
  static Constant nil() { return {TypeKind::Ref, 0}; }
  static Constant unit() { return {TypeKind::Unit, 0}; }

  bool operator==(const Constant &) const = default;
  auto operator<=>(const Constant &) const = default;
};

/// MiniLang spelling of the constant (`-1`, `false`, `nil`, or empty for unit).
std::string to_source(const Constant &c);

} // namespace paver
