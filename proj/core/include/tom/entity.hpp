#ifndef TOM_ENTITY_HPP
#define TOM_ENTITY_HPP

#include <compare>
#include <optional>
#include <string>

namespace tom {

enum class EntityKind { field, constructor, method };

std::string entity_kind_name(EntityKind k);

// Identity of a field, constructor or method. class_name is empty for
// top-level functions. Total order: (class, kind, name, arity) with
// field < constructor < method.
struct EntityId {
    std::string class_name;
    EntityKind kind = EntityKind::method;
    std::string name;
    int arity = 0; // 0 for fields

    auto operator<=>(const EntityId&) const = default;

    static EntityId field(std::string cls, std::string name) {
        return {std::move(cls), EntityKind::field, std::move(name), 0};
    }
    static EntityId ctor(std::string cls, int arity) {
        return {std::move(cls), EntityKind::constructor, "init", arity};
    }
    static EntityId method(std::string cls, std::string name, int arity) {
        return {std::move(cls), EntityKind::method, std::move(name), arity};
    }
    static EntityId function(std::string name, int arity) {
        return {"", EntityKind::method, std::move(name), arity};
    }

    bool callable() const { return kind != EntityKind::field; }

    // "C.getSum", "C.x", "C.init", "topFn"
    std::string display() const;
    // Unambiguous form: "C/method/getSum/0"
    std::string key() const;
    static std::optional<EntityId> from_key(const std::string& key);
};

} // namespace tom

#endif
