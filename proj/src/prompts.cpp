#include <string>

#include "commsense/pipeline.hpp"

namespace commsense::prompts {

namespace {

void replace_all(std::string& s, const std::string& token, const std::string& value) {
    for (auto pos = s.find(token); pos != std::string::npos; pos = s.find(token, pos + value.size())) {
        s.replace(pos, token.size(), value);
    }
}

} // namespace

std::string topic_system() {
    return "You are a professional hotel review analyst. Your task is to categorize \n"
           "the provided hotel review keywords into 6 main, high-level categories. \n"
           "Each category should have a concise description and list all the \n"
           "original keywords that belong to it. The final result must be in JSON \n"
           "format. The JSON structure should contain a list named 'categories', \n"
           "where each object in the list includes 'category', 'description', and "
           "'keywords' (a list of all keywords for that category).";
}

std::string topic_user(const std::string& keywords_string) {
    std::string s =
        "Please categorize the following hotel review keywords into 6 classes, \n"
        "and list the corresponding keywords for each category:\n"
        "Keywords: {keywords_string}\n"
        "Ensure each category name is high-level, provide a brief description, \n"
        "and include a 'keywords' list containing all keywords for that category.\n"
        "Ecach keyword should appear in only one category. \n"
        "Example JSON format:\n"
        " [\n"
        "    {\n"
        "      \"category\": \"CATEGORY_NAME_1\",\n"
        "      \"description\": \"Brief description of this category.\",\n"
        "      \"keywords\": [\"keyword1\", \"keyword2\", \"keyword3\"]\n"
        "    },\n"
        "    {\n"
        "      \"category\": \"CATEGORY_NAME_2\",\n"
        "      \"description\": \"Brief description of this category.\",\n"
        "      \"keywords\": [\"keyword4\", \"keyword5\"]\n"
        "    },\n"
        "    ...\n"
        "  ]";
    replace_all(s, "{keywords_string}", keywords_string);
    return s;
}

std::string summary_system() {
    return "You are a helpful AI assistant designed to promote reflective and balanced thinking "
           "for users analyzing online reviews. \"\"\" Your task is to analyze a user's recent "
           "reading activity and the content of the reviews they have engaged with. Based on this "
           "analysis, you will generate a concise, neutral summary of the key points from the "
           "reviews and provide a gentle, actionable suggestion to help the user consider a "
           "broader range of perspectives or topics. The final output must be in JSON format, "
           "containing two keys: 'summary' and 'suggestion'. \"\"\"";
}

std::string summary_user(const std::string& trigger_reason, const std::string& statistics,
                         const std::string& comment_texts) {
    std::string s =
        "A user is reviewing hotel comments and our system has detected a potential bias in "
        "their reading pattern.\n"
        "\n"
        "Trigger Reason: {trigger_reason}\n"
        "Reading Statistics: {statistics}\n"
        "Recently Engaged Comments:\n"
        "\"\"\"\n"
        "{comment_texts}\n"
        "\"\"\"\n"
        "\n"
        "\n"
        "Based on the information above, please generate a concise summary of the provided "
        "comments and an actionable suggestion to encourage more balanced exploration. The tone "
        "should be supportive and helpful, nudging the user to reflect without being "
        "prescriptive.\n"
        "\"\"\"\n"
        "Example JSON format:\n"
        "{\n"
        "\"summary\": \"Guests frequently praise the spacious rooms and comfortable beds, often "
        "highlighting the great views from the balcony. However, several reviews also mention "
        "that the Wi-Fi signal can be weak and the water pressure in the shower is "
        "inconsistent.\",\n"
        "\"suggestion\": \"You've focused on some of the room's technical issues. It might be "
        "useful to also see what people have said about the comfort and space of the rooms to "
        "get a fuller picture.\"\n"
        "\"\"\"\n"
        "}";
    // Values are substituted in one pass so placeholder-like text inside a
    // comment is left alone.
    std::string out;
    out.reserve(s.size() + comment_texts.size() + statistics.size());
    for (std::size_t i = 0; i < s.size();) {
        auto take = [&](const char* token, const std::string& value) {
            const std::string t(token);
            if (s.compare(i, t.size(), t) != 0) return false;
            out += value;
            i += t.size();
            return true;
        };
        if (take("{trigger_reason}", trigger_reason) || take("{statistics}", statistics) ||
            take("{comment_texts}", comment_texts)) {
            continue;
        }
        out += s[i++];
    }
    return out;
}

} // namespace commsense::prompts
