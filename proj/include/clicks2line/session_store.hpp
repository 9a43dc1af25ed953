#pragma once

#include "clicks2line/interaction.hpp"
#include "clicks2line/predictor.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace c2l {

class SessionError : public std::runtime_error {
public:
    enum class Kind { NotFound, BadRequest, Conflict };

    SessionError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

/// In-memory sessions for human-in-the-loop annotation.
///
/// Each session owns its annotation list and the mask predicted after every
/// annotation; undo pops both. Calls on one session are serialized, calls on
/// different sessions run concurrently.
class SessionStore {
public:
    SessionStore(std::shared_ptr<Predictor> predictor, Policy policy);

    struct Info {
        std::string id;
        int width = 0;
        int height = 0;
        bool has_gt = false;
    };

    struct MaskState {
        BinaryMask mask;
        std::optional<double> iou;  // present when the session has ground truth
        std::size_t depth = 0;      // annotations applied
    };

    Info create(Image image, std::optional<LabelMask> gt = std::nullopt);

    /// Appends an annotation and reruns the predictor. Out-of-bounds or
    /// malformed annotations are BadRequest; the session is unchanged when the
    /// predictor fails.
    MaskState annotate(std::string_view id, const Annotation& annotation);
    /// Conflict when there is nothing to undo.
    MaskState undo(std::string_view id);
    MaskState mask(std::string_view id) const;
    std::vector<Annotation> annotations(std::string_view id) const;

    /// The simulator's next input for this session, not applied. Conflict
    /// without ground truth; nullopt when nothing is left to fix.
    std::optional<Proposal> suggest(std::string_view id) const;

    bool erase(std::string_view id);
    std::size_t size() const;
    const Policy& policy() const { return policy_; }

private:
    struct Entry {
        mutable std::mutex mu;
        Session session;
    };

    std::shared_ptr<Entry> find(std::string_view id) const;
    static MaskState state_of(const Session& s);
    std::string new_id();

    std::shared_ptr<Predictor> predictor_;
    Policy policy_;
    mutable std::shared_mutex mu_;
    std::map<std::string, std::shared_ptr<Entry>, std::less<>> sessions_;
    std::uint64_t counter_ = 0;
    std::uint64_t salt_ = 0;
};

}  // namespace c2l
