#include <gtest/gtest.h>

#include "commsense/error.hpp"
#include "commsense/session.hpp"
#include "fixtures.hpp"

using namespace commsense;
using namespace commsense::testing;

namespace {

std::shared_ptr<const Workspace> two_topics() {
    auto comments = labelled_block("room", 3, 1, 3);
    auto more = labelled_block("beach", 2, 0, 2);
    comments.insert(comments.end(), more.begin(), more.end());
    // s12 mentions both topics.
    comments.push_back({"The room faced the beach.", SentimentLabel::positive, {1, 1, 0, 0, 0, 0, 0, 0}});
    return synthetic_workspace(comments, {{"Room", {"room"}}, {"Location", {"beach"}}});
}

Session fresh(std::shared_ptr<const Workspace> ws) { return Session("sess", std::move(ws), TriggerConfig{}, StepClock{1000, 10}); }

} // namespace

TEST(SessionView, RepeatedViewIsANoOp) {
    auto s = fresh(two_topics());
    const auto first = s.record_view("s1");
    EXPECT_TRUE(first.changed);
    EXPECT_EQ(first.seq, 1u);
    const auto again = s.record_view("s1");
    EXPECT_FALSE(again.changed);
    EXPECT_EQ(again.seq, 1u);
    EXPECT_EQ(s.log().size(), 1u);
    EXPECT_EQ(s.state().viewed.at("t1").size(), 1u);
}

TEST(SessionView, TopicLessViewCountsForEveryMatchingTopic) {
    auto s = fresh(two_topics());
    s.record_view("s12");
    EXPECT_EQ(s.state().viewed.at("t1").count(11), 1u);
    EXPECT_EQ(s.state().viewed.at("t2").count(11), 1u);
}

TEST(SessionView, TopicViewCountsOnlyThere) {
    auto s = fresh(two_topics());
    s.record_view("s12", "t2");
    EXPECT_EQ(s.state().viewed.count("t1"), 0u);
    EXPECT_EQ(s.state().viewed.at("t2").size(), 1u);
    // A later topic-less view extends it to t1.
    EXPECT_TRUE(s.record_view("s12").changed);
    EXPECT_EQ(s.state().viewed.at("t1").size(), 1u);
}

TEST(SessionView, Errors) {
    auto s = fresh(two_topics());
    EXPECT_THROW(s.record_view("nope"), NotFound);
    EXPECT_THROW(s.record_view("s1", "t9"), NotFound);
    EXPECT_THROW(s.record_view("s1", "t2"), InvalidArgument);  // room comment, beach topic
    EXPECT_EQ(s.state().seq, 0u);
}

TEST(SessionMark, MarkAndUnmark) {
    auto s = fresh(two_topics());
    EXPECT_TRUE(s.mark_useful("s1").changed);
    EXPECT_FALSE(s.mark_useful("s1").changed);
    EXPECT_TRUE(s.mark_useful("s1", false).changed);
    EXPECT_FALSE(s.mark_useful("s1", false).changed);
    EXPECT_TRUE(s.state().useful.empty());
}

TEST(SessionMark, BalanceTriggerCreatesPendingReminder) {
    auto s = fresh(two_topics());
    const auto out = s.mark_useful("s5");  // negative room comment
    ASSERT_EQ(out.triggers.size(), 1u);
    ASSERT_EQ(out.new_reminders.size(), 1u);
    const auto& r = s.reminder(out.new_reminders[0]);
    EXPECT_EQ(r.status, ReminderStatus::pending);
    EXPECT_EQ(r.text_source, "fallback");
    EXPECT_EQ(r.trigger.fired_at, out.seq);
    EXPECT_EQ(s.pending_reminders().size(), 1u);
}

TEST(SessionMark, MarkOnSharedCommentEvaluatesBothTopics) {
    auto s = fresh(two_topics());
    const auto out = s.mark_useful("s12");
    EXPECT_EQ(out.triggers.size(), 2u);
}

TEST(SessionSnippet, CopiesTextAndMetadata) {
    auto s = fresh(two_topics());
    const auto out = s.save_snippet("s12", 4, 8);
    ASSERT_TRUE(out.snippet);
    EXPECT_EQ(out.snippet->text, "room");
    EXPECT_EQ(out.snippet->topic_id, "t1");
    EXPECT_EQ(out.snippet->sentiment, SentimentLabel::positive);
    EXPECT_EQ(out.snippet->snippet_id, "s1");
    const auto other = s.save_snippet("s12", 4, 8, "t2");
    EXPECT_EQ(other.snippet->topic_id, "t2");
}

TEST(SessionSnippet, RejectsBadRanges) {
    auto s = fresh(two_topics());
    const auto len = s.workspace().corpus().at("s1").text.size();
    EXPECT_THROW(s.save_snippet("s1", 3, 3), InvalidArgument);
    EXPECT_THROW(s.save_snippet("s1", 5, 2), InvalidArgument);
    EXPECT_THROW(s.save_snippet("s1", 0, len + 1), InvalidArgument);
    EXPECT_NO_THROW(s.save_snippet("s1", 0, len));
}

TEST(SessionResolve, OnlyPendingRemindersResolve) {
    auto s = fresh(two_topics());
    const auto id = s.mark_useful("s5").new_reminders.at(0);
    const auto out = s.resolve_reminder(id, ReminderAction::add, "good point");
    ASSERT_TRUE(out.reminder);
    EXPECT_EQ(out.reminder->status, ReminderStatus::added);
    EXPECT_EQ(out.reminder->user_mind, "good point");
    EXPECT_THROW(s.resolve_reminder(id, ReminderAction::dismiss), StateError);
    EXPECT_THROW(s.resolve_reminder("r99", ReminderAction::add), NotFound);
}

TEST(SessionThoughts, AddEditAndReject) {
    auto s = fresh(two_topics());
    EXPECT_THROW(s.add_thought(""), InvalidArgument);
    EXPECT_THROW(s.add_thought("  \n"), InvalidArgument);
    const auto t1 = s.add_thought("location great, noise bad");
    ASSERT_TRUE(t1.thought);
    const auto t2 = s.edit_thought(t1.thought->thought_id, "location great");
    EXPECT_EQ(t2.thought->supersedes, t1.thought->thought_id);
    EXPECT_THROW(s.edit_thought(t1.thought->thought_id, "again"), StateError);
    EXPECT_THROW(s.edit_thought("th42", "x"), NotFound);
    EXPECT_FALSE(s.edit_thought(t2.thought->thought_id, "location great").changed);
}

TEST(SessionReminderText, UpgradesPendingOnly) {
    auto s = fresh(two_topics());
    const auto id = s.mark_useful("s5").new_reminders.at(0);
    const auto up = s.set_reminder_text(id, "Generated summary", "Generated suggestion");
    EXPECT_TRUE(up.changed);
    EXPECT_EQ(s.reminder(id).text_source, "generator");
    s.resolve_reminder(id, ReminderAction::dismiss);
    EXPECT_FALSE(s.set_reminder_text(id, "Late", "Late").changed);
    EXPECT_EQ(s.reminder(id).summary, "Generated summary");
}

TEST(SessionTime, TimestampsNeverDecrease) {
    std::int64_t t = 5000;
    Session s("sess", two_topics(), TriggerConfig{}, [&t] { return t -= 100; });
    s.record_view("s1");
    s.record_view("s2");
    s.add_thought("x");
    EXPECT_EQ(s.log()[0].at, 4900);
    EXPECT_EQ(s.log()[1].at, 4900);
    EXPECT_EQ(s.log()[2].at, 4900);
}

TEST(SessionReplay, ReproducesStateExactly) {
    auto ws = two_topics();
    auto s = fresh(ws);
    s.record_view("s1");
    s.mark_useful("s5");
    s.record_view("s12", "t2");
    s.save_snippet("s2", 0, 7);
    s.add_thought("first");
    s.resolve_reminder("r1", ReminderAction::add, "noted");
    s.mark_useful("s5", false);
    s.mark_useful("s8");
    s.set_reminder_text("r2", "gen", "gen2");
    const auto copy = Session::replay("sess", ws, TriggerConfig{}, s.log());
    EXPECT_EQ(copy.state(), s.state());
    EXPECT_EQ(state_json(copy.state(), *ws).dump(), state_json(s.state(), *ws).dump());
    EXPECT_EQ(copy.log(), s.log());
}

TEST(SessionReplay, RejectsOutOfOrderAndNoOpEvents) {
    auto ws = two_topics();
    auto s = fresh(ws);
    s.record_view("s1");
    auto log = s.log();
    log.push_back(log.front());
    EXPECT_THROW(Session::replay("x", ws, TriggerConfig{}, log), StateError);
    auto dup = s.log();
    dup.push_back(dup.front());
    dup.back().seq = 2;
    EXPECT_THROW(Session::replay("x", ws, TriggerConfig{}, dup), StateError);
}

TEST(SessionEvents, JsonRoundTrip) {
    auto s = fresh(two_topics());
    s.record_view("s1", "t1");
    s.mark_useful("s5");
    s.save_snippet("s2", 0, 7);
    s.add_thought("first");
    s.edit_thought("th1", "second");
    s.resolve_reminder("r1", ReminderAction::dismiss);
    for (const auto& e : s.log()) {
        nlohmann::json j = e;
        EXPECT_EQ(j.get<SessionEvent>(), e) << j.dump();
    }
    nlohmann::json bad = s.log().front();
    bad["type"] = "teleport";
    EXPECT_THROW(bad.get<SessionEvent>(), InvalidArgument);
}

TEST(SessionSink, ReceivesEveryLoggedEvent) {
    auto s = fresh(two_topics());
    std::vector<SessionEvent> seen;
    s.set_sink([&](const SessionEvent& e) { seen.push_back(e); });
    s.record_view("s1");
    s.record_view("s1");
    s.mark_useful("s2");
    EXPECT_EQ(seen, s.log());
    EXPECT_EQ(seen.size(), 2u);
}

TEST(SessionProgress, CountsViewedMembersOfSelection) {
    auto s = fresh(two_topics());
    s.record_view("s1");
    s.record_view("s12", "t2");
    EXPECT_EQ(s.progress(Selection::all()), (Progress{2, 12}));
    EXPECT_EQ(s.progress(Selection::topic("t1")), (Progress{2, 8}));
    EXPECT_EQ(s.progress(Selection::topic("t2")), (Progress{1, 5}));
    EXPECT_THROW(s.progress(Selection::topic("t7")), NotFound);
}
