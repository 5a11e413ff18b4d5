// Copyright 2026 The instructgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "instructgen/analytics.hpp"

#include <sstream>

namespace instructgen {
namespace {

// Word lists are space separated to keep them diffable; bump kVersion on
// any edit so stats reports stay comparable.
constexpr const char* kVersion = "1";

constexpr const char* kVerbs =
    "abbreviate abstract accelerate accept access accommodate accomplish account accrue accumulate "
    "achieve acknowledge acquire act activate adapt add address adhere adjudicate adjust administer adopt "
    "advance advise advocate affirm aggregate aid alert align allocate allow alter amass amend amortize "
    "amplify analyse analyze anchor annotate answer anticipate apply appoint appraise approach approve "
    "approximate arbitrate archive argue arrange articulate ascertain assemble assert assess assign "
    "assimilate assist associate assume attach attain attempt attend attribute audit augment authenticate "
    "authorize automate average avoid award back balance bargain begin benchmark bisect blend boost "
    "borrow bound brainstorm break brief bring broadcast browse budget build bundle buy calculate "
    "calibrate cancel capture carry cast categorize centralize certify chain challenge change "
    "characterize chart check choose circulate cite claim clarify classify clean clear close cluster "
    "coach code collaborate collapse collate collect combine comment commit communicate compare "
    "compensate compete compile complement complete comply compose compound compress compute conceive "
    "concentrate conceptualize conclude condense condition conduct configure confirm connect conserve "
    "consider consolidate construct consult contact contain contest contextualize continue contract "
    "contrast contribute control convert convey convince coordinate copy correct correlate count cover "
    "craft create credit critique cultivate curate customize cut deal debate debug decide decipher "
    "declare decode decompose deconstruct decrease deduce deduct deem default defend define delegate "
    "delete delineate deliver demand demonstrate denote depict deploy deposit derive describe design "
    "designate detach detail detect determine develop devise devote diagnose diagram differentiate "
    "digitize diminish direct disaggregate discern disclose discount discover discriminate discuss "
    "dismiss dispatch display dispute dissect dissolve distill distinguish distribute diversify divert "
    "divide document draft draw drive duplicate earn edit educate elaborate elect electrify elicit "
    "eliminate embed emerge emphasize employ emulate enable enact encapsulate encode encounter encourage "
    "end endorse endure enforce engage engineer enhance enlarge enlist enrich enroll ensure enter "
    "enumerate envision equate equip erase escalate establish estimate evaluate evolve examine exceed "
    "exchange exclude execute exemplify exercise exhibit expand expect expedite experience experiment "
    "explain explicate explore export express extend extract extrapolate fabricate facilitate factor "
    "fetch fill filter finalize find fit fix flag focus forecast forge formalize format formulate forward "
    "foster found frame fund gain gather gauge generalize generate give govern grade grant graph group "
    "grow guide handle harmonize hedge highlight hire hold host hypothesize identify ignore illustrate "
    "imagine implement implore imply import impose improve include incorporate increase incur index "
    "indicate induce infer influence inform inherit initiate innovate input inspect install instruct "
    "insure integrate interact interpolate interpret intervene interview introduce invent inventory "
    "invert invest investigate isolate issue itemize iterate join judge justify keep label launch lay "
    "lead learn lend leverage license lift limit link list locate log look lower maintain make manage "
    "manipulate map mark match maximize measure mediate memorialize memorize mentor merge migrate "
    "minimize mitigate mobilize model moderate modify monitor motivate multiply name navigate negotiate "
    "nominate normalize note notice notify nurture obey observe obtain occupy offer omit open operate "
    "oppose optimize orchestrate order organize originate outline overcome overhaul oversee paraphrase "
    "parse participate partition pay perceive perform permit persuade pick pinpoint pioneer place plan "
    "plead pledge plot point polish ponder portray position postulate practice predict prepare prescribe "
    "present preserve pretend prevent preview price prioritize probe proceed process procure produce "
    "profile program progress project promote prompt propose protect prove provide publish pursue "
    "quantify query question quote raise rank rate rationalize react read reason rebalance rebuild recall "
    "receive recognize recommend reconcile reconstruct record recount recruit redeem redesign reduce "
    "refactor refer refine reflect reformulate reframe register regress regulate rehearse reinforce "
    "reiterate reject relate release relocate remedy remember remove render renew reorganize repair "
    "repeat rephrase replace replicate report represent reproduce request research resell reserve resolve "
    "respond restate restore restructure retain retire retrieve return reveal review revise reward "
    "rewrite run sample satisfy save scale schedule score screen search secure select sell separate "
    "sequence serve set settle share show signal simplify simulate sketch solve sort specify speculate "
    "split sponsor stabilize standardize start state steer strengthen stress structure study submit "
    "substitute subtract succeed suggest summarise summarize summon supervise supply support suppose "
    "surpass survey sustain swap symbolize synthesize systematize table tabulate tackle tailor take "
    "target teach terminate test theorize think trace track trade train transcribe transfer transform "
    "translate transmit treat trend troubleshoot tune uncover underline understand undertake unify unpack "
    "update upgrade uphold use utilize validate value vary verbalize verify view visualize volunteer "
    "weigh weight withdraw write yield zoom ";

constexpr const char* kStopwords =
    "a about above across after against all along also am among an and another any are around as at based "
    "be been before being below between beyond both but by can could did do does doing during each either "
    "etc every few five for four from given had has have having he her here hers him his how however i if "
    "in including into is it its itself just least less many may me might mine more most much must my "
    "neither no nor not of on one only onto or other our ours over own per rather several she should so "
    "some such than that the their theirs them then there these they this those three through thus to too "
    "two under upon us using very via was we were what when where whether which while who whom whose why "
    "will with within without would yet you your yours ";

std::vector<std::string> split_words(const char* text)
{
    std::istringstream in(text);
    std::vector<std::string> out;
    for (std::string w; in >> w;) out.push_back(w);
    return out;
}

} // namespace

const Lexicon& Lexicon::bundled()
{
    static const Lexicon lexicon(split_words(kVerbs), split_words(kStopwords), kVersion);
    return lexicon;
}

} // namespace instructgen
