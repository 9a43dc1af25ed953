#include "clicks2line/session_store.hpp"

#include <cstdio>
#include <random>

namespace c2l {

SessionStore::SessionStore(std::shared_ptr<Predictor> predictor, Policy policy)
    : predictor_(std::move(predictor)), policy_(std::move(policy)) {
    if (!predictor_) {
        throw std::invalid_argument("SessionStore: predictor is required");
    }
    policy_.validate();
    std::random_device rd;
    salt_ = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

std::string SessionStore::new_id() {
    // splitmix64 over a counter: unique per store, not guessable across restarts.
    std::uint64_t z = salt_ + 0x9e3779b97f4a7c15ULL * ++counter_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(z));
    return buf;
}

SessionStore::Info SessionStore::create(Image image, std::optional<LabelMask> gt) {
    if (image.width < 1 || image.height < 1) {
        throw SessionError(SessionError::Kind::BadRequest, "empty image");
    }
    if (gt && (gt->width() != image.width || gt->height() != image.height)) {
        throw SessionError(SessionError::Kind::BadRequest, "ground truth size differs from the image");
    }
    auto entry = std::make_shared<Entry>();
    entry->session.image = std::move(image);
    entry->session.gt = std::move(gt);

    Info info{{}, entry->session.image.width, entry->session.image.height, entry->session.gt.has_value()};
    std::unique_lock lock(mu_);
    do {
        info.id = new_id();
    } while (sessions_.contains(info.id));
    sessions_.emplace(info.id, std::move(entry));
    return info;
}

std::shared_ptr<SessionStore::Entry> SessionStore::find(std::string_view id) const {
    std::shared_lock lock(mu_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) {
        throw SessionError(SessionError::Kind::NotFound, "unknown session '" + std::string(id) + "'");
    }
    return it->second;
}

SessionStore::MaskState SessionStore::state_of(const Session& s) {
    MaskState st{s.current_mask(), std::nullopt, s.annotations.size()};
    if (s.gt) {
        st.iou = iou(st.mask, *s.gt);
    }
    return st;
}

SessionStore::MaskState SessionStore::annotate(std::string_view id, const Annotation& annotation) {
    auto entry = find(id);
    std::lock_guard lock(entry->mu);
    Session& s = entry->session;
    try {
        validate(annotation, s.image.width, s.image.height);
    } catch (const std::invalid_argument& e) {
        throw SessionError(SessionError::Kind::BadRequest, e.what());
    }
    std::vector<Annotation> next = s.annotations;
    next.push_back(annotation);
    const BinaryMask* previous = s.masks.empty() ? nullptr : &s.masks.back();
    BinaryMask mask = predictor_->predict({s.image, next, previous});
    if (mask.width() != s.image.width || mask.height() != s.image.height) {
        throw PredictorError(PredictorError::Kind::DimensionMismatch,
                             "predictor returned a mask of the wrong size");
    }
    s.annotations = std::move(next);
    s.masks.push_back(std::move(mask));
    s.cumulative_cost += annotation.cost();
    return state_of(s);
}

SessionStore::MaskState SessionStore::undo(std::string_view id) {
    auto entry = find(id);
    std::lock_guard lock(entry->mu);
    Session& s = entry->session;
    if (s.annotations.empty()) {
        throw SessionError(SessionError::Kind::Conflict, "nothing to undo");
    }
    s.cumulative_cost -= s.annotations.back().cost();
    s.annotations.pop_back();
    s.masks.pop_back();
    return state_of(s);
}

SessionStore::MaskState SessionStore::mask(std::string_view id) const {
    auto entry = find(id);
    std::lock_guard lock(entry->mu);
    return state_of(entry->session);
}

std::vector<Annotation> SessionStore::annotations(std::string_view id) const {
    auto entry = find(id);
    std::lock_guard lock(entry->mu);
    return entry->session.annotations;
}

std::optional<Proposal> SessionStore::suggest(std::string_view id) const {
    auto entry = find(id);
    std::lock_guard lock(entry->mu);
    const Session& s = entry->session;
    if (!s.gt) {
        throw SessionError(SessionError::Kind::Conflict, "suggest needs a session with ground truth");
    }
    const auto candidates = cached_candidates(policy_.candidates);
    return propose_input(*s.gt, s.current_mask(), static_cast<int>(s.annotations.size()),
                         policy_.budget - s.cumulative_cost, policy_, *candidates);
}

bool SessionStore::erase(std::string_view id) {
    std::unique_lock lock(mu_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) {
        return false;
    }
    sessions_.erase(it);
    return true;
}

std::size_t SessionStore::size() const {
    std::shared_lock lock(mu_);
    return sessions_.size();
}

}  // namespace c2l
