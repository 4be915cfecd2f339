#include "tutor/demo_pack.hpp"

#include <array>
#include <functional>
#include <sstream>

namespace tutor {

namespace {

struct Item {
  std::string stem;
  std::string answer;
  std::array<std::string, 3> distractors;
};

// Rotates the correct answer through the choice positions.
Question make_question(const std::string& concept_id, const std::string& section, int index, KnowledgeLevel level,
                       const Item& item) {
  Question q;
  std::ostringstream id;
  id << concept_id << "-q" << (index < 10 ? "0" : "") << index;
  q.question_id = id.str();
  q.concept_id = concept_id;
  q.section_id = section;
  q.level = level;
  q.score_weight = 1 + static_cast<int>(level) / 2;
  q.eval_kind = index % 2 == 0 ? EvalKind::Conceptual : EvalKind::Objective;
  q.stem = {{"en", item.stem}};
  const int correct = index % 4;
  int d = 0;
  for (int c = 0; c < 4; ++c) {
    q.choices.push_back({{"en", c == correct ? item.answer : item.distractors[d++]}});
  }
  q.correct_index = correct;
  return q;
}

void add_section(ContentPack& pack, const std::string& concept_id, const std::string& section, int& index,
                 const std::function<Item(int)>& generate) {
  for (auto level : kAllLevels) {
    const int step = static_cast<int>(level) + 1;
    pack.questions.push_back(make_question(concept_id, section, ++index, level, generate(step)));
  }
}

std::string num(int v) { return std::to_string(v); }

std::string decimal(int tenths_or_hundredths, int scale) {
  std::ostringstream s;
  s << tenths_or_hundredths / scale << '.';
  const int frac = tenths_or_hundredths % scale;
  if (scale == 100 && frac < 10) s << '0';
  s << frac;
  return s.str();
}

LessonVariant lesson(const std::string& concept_id, LearningStyle style, std::initializer_list<const char*> blocks) {
  LessonVariant v{concept_id, style, {}};
  for (const char* b : blocks) v.body.push_back({"en", b});
  return v;
}

}  // namespace

ContentPack demo_pack() {
  ContentPack pack;
  pack.pack_id = "demo-arithmetic";
  pack.version = "1.0.0";
  pack.default_language = "en";

  pack.concepts = {
      {"c1-whole-numbers",
       {{"en", "Whole numbers"}, {"fa", "اعداد صحیح"}},
       {"s1-addition", "s2-subtraction", "s3-multiplication"},
       {}},
      {"c2-fractions",
       {{"en", "Fractions"}, {"fa", "کسرها"}},
       {"s1-parts", "s2-equivalence", "s3-comparison"},
       {"c1-whole-numbers"}},
      {"c3-decimals",
       {{"en", "Decimals"}, {"fa", "اعشار"}},
       {"s1-place-value", "s2-conversion", "s3-rounding"},
       {"c2-fractions"}},
  };

  int index = 0;
  const std::string c1 = "c1-whole-numbers";
  add_section(pack, c1, "s1-addition", index, [](int k) {
    const int a = 7 * k * k + 3, b = 5 * k + 4;
    return Item{"What is " + num(a) + " + " + num(b) + "?", num(a + b), {num(a + b + 1), num(a + b - 10), num(a * b)}};
  });
  add_section(pack, c1, "s2-subtraction", index, [](int k) {
    const int a = 40 * k + 17, b = 9 * k + 8;
    return Item{"What is " + num(a) + " - " + num(b) + "?", num(a - b), {num(a - b + 10), num(a + b), num(a - b - 1)}};
  });
  add_section(pack, c1, "s3-multiplication", index, [](int k) {
    const int a = 3 + 2 * k, b = 4 + 3 * k;
    return Item{"What is " + num(a) + " x " + num(b) + "?", num(a * b), {num(a * b + a), num(a + b), num(a * b - b)}};
  });
  // A few stems are authored in Persian as well.
  for (auto& q : pack.questions) {
    if (q.section_id == "s1-addition" && q.level <= KnowledgeLevel::Good) {
      auto en = q.stem.at("en");
      q.stem["fa"] = en.substr(8, en.size() - 9) + " چند است؟";
    }
  }

  index = 0;
  const std::string c2 = "c2-fractions";
  add_section(pack, c2, "s1-parts", index, [](int k) {
    const int n = 4 + 2 * k, e = 1 + k;
    return Item{"A cake is cut into " + num(n) + " equal slices and you eat " + num(e) +
                    ". What fraction of the cake did you eat?",
                num(e) + "/" + num(n), {num(n) + "/" + num(e), num(e) + "/" + num(n + e), num(n - e) + "/" + num(n)}};
  });
  add_section(pack, c2, "s2-equivalence", index, [](int k) {
    const int a = k, b = k + 2, m = k + 1;
    return Item{"Which fraction is equivalent to " + num(a) + "/" + num(b) + "?", num(a * m) + "/" + num(b * m),
                {num(a + m) + "/" + num(b + m), num(a * m) + "/" + num(b), num(b) + "/" + num(a)}};
  });
  add_section(pack, c2, "s3-comparison", index, [](int k) {
    const int a = k, b = k + 1, c = k + 1, d = k + 3;
    return Item{"Which fraction is larger: " + num(a) + "/" + num(b) + " or " + num(c) + "/" + num(d) + "?",
                num(a) + "/" + num(b), {num(c) + "/" + num(d), "They are equal", "It cannot be decided"}};
  });

  index = 0;
  const std::string c3 = "c3-decimals";
  add_section(pack, c3, "s1-place-value", index, [](int k) {
    const int v = 1000 * k + 100 * (k + 2) + 10 * (k + 4) + (k + 1) % 10;  // hundredths
    const int tenths = (v / 10) % 10;
    return Item{"What digit is in the tenths place of " + decimal(v, 100) + "?", num(tenths),
                {num((v / 100) % 10), num(v % 10), num((tenths + 5) % 10)}};
  });
  add_section(pack, c3, "s2-conversion", index, [](int k) {
    const int n = 3 * k + 2;
    return Item{"Write " + num(n) + "/100 as a decimal.", decimal(n, 100),
                {decimal(n, 10), num(n) + ".0", decimal(n * 10, 100)}};
  });
  add_section(pack, c3, "s3-rounding", index, [](int k) {
    const int v = 100 * k + 37 + 20 * (k % 2);  // hundredths
    const int rounded = (v + 50) / 100;
    return Item{"Round " + decimal(v, 100) + " to the nearest whole number.", num(rounded),
                {num(rounded + 1), num(rounded - 1), num(rounded * 10)}};
  });

  using enum LearningStyle;
  pack.lessons = {
      lesson(c1, DeepLearningAchiever,
             {"Whole numbers count things. Addition joins two groups; subtraction takes one group away.",
              "Multiplication is repeated addition: 4 x 3 means 4 + 4 + 4.",
              "Check each answer by reversing the operation."}),
      lesson(c1, GoalOrientedAchiever,
             {"Goal: add, subtract and multiply whole numbers quickly.",
              "Line the digits up by place value and work from right to left.",
              "Finish the practice set and check your score."}),
      lesson(c1, SensationSeeking,
             {"Race the clock! How fast can you add 25 + 17?",
              "Picture a row of boxes with 4 apples in each of 3 boxes: that is 12 apples."}),
      lesson(c2, DeepLearningAchiever,
             {"A fraction names equal parts of a whole: the denominator counts the parts, the numerator the parts taken.",
              "Multiplying top and bottom by the same number gives an equivalent fraction.",
              "To compare fractions, rewrite them over a common denominator."}),
      lesson(c2, ConscientiousAchiever,
             {"Step 1: identify the whole. Step 2: count the equal parts. Step 3: count the parts taken.",
              "Write the fraction as parts taken over total parts, then simplify."}),
      lesson(c2, SensationSeeking,
             {"Slice a pizza into 8 pieces and grab 3: you have 3/8 of the pizza.",
              "Who gets more pizza, 1/2 or 3/8? Cut and see!"}),
      lesson(c3, DeepLearningAchiever,
             {"A decimal is a fraction whose denominator is a power of ten.",
              "Each place to the right of the point is ten times smaller: tenths, hundredths, thousandths.",
              "To round, look at the digit just right of the place you keep."}),
      lesson(c3, GoalOrientedAchiever,
             {"Goal: read, convert and round decimals.",
              "Convert n/100 by moving the point two places left.",
              "Round up when the next digit is 5 or more."}),
  };

  const std::array<const char*, 10> prompts = {
      "I enjoy trying new and exciting activities.",
      "I get bored quickly with routine tasks.",
      "I set clear goals before I start studying.",
      "I rarely plan how I will reach a target.",
      "I notice how other people in my class feel.",
      "I work well when I can discuss ideas with others.",
      "I finish every task carefully and on time.",
      "I often leave work unfinished.",
      "I like to understand why an idea is true.",
      "I look for the principles behind examples.",
  };
  for (std::size_t i = 0; i < prompts.size(); ++i) {
    QuestionnaireItem item;
    item.item_id = std::string("lsp-") + (i + 1 < 10 ? "0" : "") + std::to_string(i + 1);
    item.prompt = {{"en", prompts[i]}};
    item.scale = kAllStyles[i / 2];
    item.reverse_scored = i == 3 || i == 7;
    pack.questionnaire.push_back(std::move(item));
  }

  canonicalize(pack);
  return pack;
}

std::string demo_glossary() {
  return "# source\ttarget\tterm\ttranslation\n"
         "en\tfa\tbook\tکتاب\n"
         "en\tfa\thello\tسلام\n"
         "en\tfa\tmachine\tماشین\n"
         "en\tfa\tmachine translation\tترجمه ماشینی\n"
         "en\tfa\tfraction\tکسر\n"
         "en\tfa\tWhole numbers\tاعداد صحیح\n"
         "en\tfa\tWhat is\tچیست\n"
         "en\tfa\tgoal\tهدف\n"
         "en\tes\tbook\tlibro\n"
         "en\tes\thello\thola\n"
         "en\tes\tfraction\tfracción\n"
         "en\tes\tWhat is\tCuánto es\n"
         "fa\ten\tکتاب\tbook\n"
         "fa\ten\tسلام\thello\n"
         "es\ten\tlibro\tbook\n"
         "es\ten\thola\thello\n"
         "fa\tes\n"
         "es\tfa\n";
}

}  // namespace tutor
