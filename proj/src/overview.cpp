#include "commsense/overview.hpp"

#include <algorithm>

namespace commsense {

using json = nlohmann::json;

void to_json(json& j, const BinView& b) {
    j = json{{"bin_id", b.bin_id},
             {"level", b.level},
             {"q", b.q},
             {"r", b.r},
             {"slot", b.slot},
             {"cx", b.cx},
             {"cy", b.cy},
             {"size", b.size()},
             {"comment_ids", b.comment_ids},
             {"sentiment_mix", {{"positive", b.positive}, {"neutral", b.neutral}, {"negative", b.negative}}},
             {"mask_fraction", b.mask_fraction}};
}

void to_json(json& j, const OverviewSnapshot& s) {
    j = json{{"selection", selection_json(s.selection)},
             {"bins", s.bins},
             {"rings", s.rings},
             {"progress", {{"viewed", s.progress.viewed}, {"total", s.progress.total}}},
             {"seq", s.seq}};
}

OverviewSnapshot overview_state(const Session& session, const Selection& selection) {
    const auto& ws = session.workspace();
    const auto& corpus = ws.corpus();
    const auto& viewed = session.state().viewed_any;

    OverviewSnapshot snap;
    snap.selection = selection;
    snap.rings = ws.rings();
    snap.seq = session.state().seq;

    std::vector<bool> selected(corpus.size(), false);
    for (auto c : ws.resolve(selection)) selected[c] = true;

    for (const auto& bin : ws.bins()) {
        BinView v;
        v.bin_id = bin.bin_id;
        v.level = bin.level;
        v.q = bin.q;
        v.r = bin.r;
        v.slot = bin.slot;
        v.cx = bin.cx;
        v.cy = bin.cy;
        std::size_t seen = 0;
        for (auto c : bin.comments) {
            if (!selected[c]) continue;
            v.comment_ids.push_back(corpus[c].id);
            switch (corpus.sentiment(c)) {
            case SentimentLabel::positive: ++v.positive; break;
            case SentimentLabel::neutral: ++v.neutral; break;
            case SentimentLabel::negative: ++v.negative; break;
            }
            seen += viewed.count(c);
        }
        if (v.comment_ids.empty()) continue;
        v.mask_fraction = static_cast<double>(seen) / static_cast<double>(v.size());
        snap.bins.push_back(std::move(v));
    }
    snap.progress = session.progress(selection);
    return snap;
}

} // namespace commsense
