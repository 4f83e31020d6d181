#include "demosel/corpus.hpp"
#include "demosel/rng.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <string>

namespace demosel {
namespace {

// Each domain supplies its own dialogue phrasing so that surface similarity
// is driven by topic and slot values. The omission type only shows up in the
// incomplete utterance.
struct Domain {
    std::string noun;
    std::string unit;  // what gets booked
    std::vector<std::string> names;
    std::vector<std::string> extras;     // cuisine, star rating, ...
    std::vector<std::string> alternatives;
    std::vector<std::array<std::string, 3>> contexts;  // turn templates
};

struct OmissionTemplate {
    std::string incomplete;  // contains {GAP}
    std::string span;
};

const std::vector<std::string> kPrices = {"cheap", "moderate", "expensive", "budget", "luxury"};
const std::vector<std::string> kAreas = {"north", "south", "east", "west", "centre"};
const std::vector<std::string> kDays = {"monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday"};
const std::vector<std::string> kPeople = {"two", "three", "four", "five", "six", "seven", "eight"};

const std::vector<Domain>& domains() {
    static const std::vector<Domain> d = {
        {"restaurant",
         "a table",
         {"the golden curry", "pizza express", "the copper kettle", "bangkok city", "la margherita", "the nirala",
          "curry garden", "the gardenia", "saigon city", "the lucky star", "meze bar", "the cow pizza kitchen"},
         {"italian", "indian", "thai", "chinese", "french", "fusion", "turkish", "mexican", "korean", "british"},
         {"mediterranean food", "a seafood place", "spanish cuisine", "some vegetarian dishes", "a steakhouse"},
         {{{"i am looking for a {price} restaurant in the {area} that serves {extra} food .",
            "{name} is a {price} {extra} restaurant in the {area} . would you like to book ?",
            "maybe , tell me more about the menu at {name} ."}},
          {{"hello , can you help me find a place to eat ? something {price} in the {area} .",
            "sure , {name} serves {extra} food and is in the {price} price range in the {area} .",
            "great , {name} sounds nice for dinner ."}},
          {{"we want {extra} food tonight , ideally {price} , around the {area} .",
            "i recommend {name} , a {price} {extra} restaurant located in the {area} .",
            "ok , is {name} usually busy in the evening ?"}}}},
        {"hotel",
         "a room",
         {"the acorn guest house", "the lensfield hotel", "the gonville hotel", "city centre north", "the cambridge belfry",
          "the alpha milton", "the huntingdon marriott", "the varsity lodge", "the university arms", "the avalon"},
         {"two star", "three star", "four star", "five star", "one star"},
         {"a guesthouse", "a place with free wifi", "a bed and breakfast", "a hotel with a pool", "a serviced apartment"},
         {{{"i need a {price} hotel in the {area} , preferably {extra} .",
            "{name} is a {extra} hotel in the {area} in the {price} price range .",
            "does {name} have rooms available this week ?"}},
          {{"could you find me somewhere to stay in the {area} ? {price} please .",
            "there is {name} , a {price} {extra} hotel located in the {area} .",
            "hmm , {name} might work for our stay ."}},
          {{"my family needs a {extra} hotel , {price} if possible , close to the {area} .",
            "{name} matches : {extra} , {price} , and it sits in the {area} .",
            "alright , what rooms does {name} offer ?"}}}},
        {"museum",
         "a guided tour",
         {"the fitzwilliam museum", "kettles yard", "the whipple museum", "the sedgwick museum", "the polar museum",
          "the scott gallery", "the broughton house", "the castle galleries", "the folk museum"},
         {"art", "science", "history", "modern art", "natural history", "photography"},
         {"a gallery", "a sculpture park", "a historic church", "a botanical garden", "a theatre"},
         {{{"are there any {price} {extra} museums to visit in the {area} ?",
            "{name} is a {extra} museum in the {area} with {price} entrance fees .",
            "what exhibitions are on at {name} right now ?"}},
          {{"i would like to see some {extra} today in the {area} , {price} please .",
            "you could visit {name} , a {price} {extra} museum in the {area} .",
            "nice , {name} could be fun for the kids ."}},
          {{"we love {extra} exhibits , is there anything {price} near the {area} ?",
            "{name} in the {area} shows {extra} and its tickets are {price} .",
            "how long does a visit to {name} take ?"}}}},
        {"bar",
         "a booth",
         {"the eagle", "the mill", "the anchor", "the fort st george", "the granta", "the pickerel inn",
          "the punter", "the maypole", "the free press"},
         {"craft beer", "cocktail", "wine", "live music", "sports", "whisky"},
         {"a quiet pub", "a rooftop terrace", "a karaoke bar", "a jazz club", "a beer garden"},
         {{{"where can i get a {price} drink in the {area} ? we like {extra} places .",
            "{name} is a {price} {extra} bar in the {area} , popular with locals .",
            "cool , what time does {name} close ?"}},
          {{"find me a {extra} bar in the {area} , nothing too {price} .",
            "try {name} , a {extra} bar in the {area} with {price} prices .",
            "i have heard of {name} before ."}},
          {{"any {extra} bars around the {area} with {price} drinks ?",
            "{name} in the {area} does {extra} nights and is {price} .",
            "does {name} get crowded on weekends ?"}}}},
        {"cinema",
         "two seats",
         {"the vue", "the arts picturehouse", "the cineworld", "the light cinema", "the odeon", "the regal",
          "the corn exchange", "the central picture house"},
         {"action", "comedy", "drama", "horror", "documentary", "animated"},
         {"an imax screening", "a late night showing", "a matinee", "a drive in", "an open air screening"},
         {{{"is there a {price} cinema in the {area} showing {extra} films ?",
            "{name} is a {price} cinema in the {area} playing several {extra} films .",
            "what is showing at {name} tonight ?"}},
          {{"we want to watch a {extra} movie in the {area} , {price} tickets ideally .",
            "{name} in the {area} has {extra} films and {price} tickets .",
            "ok , {name} is easy for us to reach ."}},
          {{"recommend a cinema for {extra} fans near the {area} , {price} please .",
            "{name} is popular for {extra} screenings , {price} , in the {area} .",
            "has {name} been renovated recently ?"}}}},
    };
    return d;
}

const std::vector<std::string> kTypes = {"dropped_attribute", "dropped_subject", "dropped_location", "dropped_object"};

// Incomplete-utterance templates per omission type, in kTypes order. The
// restored span is assembled from context slots.
const std::vector<std::vector<OmissionTemplate>>& omission_templates() {
    static const std::vector<std::vector<OmissionTemplate>> t = {
        {{"would {alt} {GAP} work instead ?", "that is also in the {price} price range"},
         {"is {alt} {GAP} possible instead ?", "that is also in the {price} price range"},
         {"could we try {alt} {GAP} instead ?", "that is also in the {price} price range"},
         {"what about {alt} {GAP} instead ?", "that is also in the {price} price range"}},
        {{"could you tell me the phone number {GAP} ?", "of the {noun} called {name} that you mentioned"},
         {"could you tell me the address {GAP} ?", "of the {noun} called {name} that you mentioned"},
         {"could you tell me the postcode {GAP} ?", "of the {noun} called {name} that you mentioned"},
         {"could you tell me if parking is free {GAP} ?", "at the {noun} called {name} that you mentioned"}},
        {{"are there any other options {GAP} ?", "located over in the {area} part of town"},
         {"are there any other ones {GAP} ?", "located over in the {area} part of town"},
         {"are there any other choices {GAP} ?", "located over in the {area} part of town"},
         {"are there any other places {GAP} ?", "located over in the {area} part of town"}},
        {{"please go ahead and book {GAP} for {people} .", "{unit} at the {noun} called {name}"},
         {"please go ahead and reserve {GAP} for {people} .", "{unit} at the {noun} called {name}"},
         {"please go ahead and book {GAP} on {day} .", "{unit} at the {noun} called {name}"},
         {"please go ahead and reserve {GAP} on {day} .", "{unit} at the {noun} called {name}"}},
    };
    return t;
}

const std::string& pick(const std::vector<std::string>& v, Rng& rng) { return v[rng.below(v.size())]; }

std::string fill(std::string text, const std::vector<std::pair<std::string, std::string>>& slots) {
    for (const auto& [key, value] : slots) {
        const std::string marker = "{" + key + "}";
        for (std::size_t pos = text.find(marker); pos != std::string::npos; pos = text.find(marker, pos + value.size())) {
            text.replace(pos, marker.size(), value);
        }
    }
    return text;
}

std::string collapse_gap(std::string text, const std::string& with) {
    const std::string marker = "{GAP}";
    const auto pos = text.find(marker);
    if (with.empty()) {
        // drop the marker together with one adjacent space
        const auto erase_from = pos > 0 && text[pos - 1] == ' ' ? pos - 1 : pos;
        text.erase(erase_from, pos + marker.size() - erase_from);
    } else {
        text.replace(pos, marker.size(), with);
    }
    return text;
}

DialogueCase make_case(std::string id, std::size_t type_index, Rng& rng) {
    const auto& dom = domains()[rng.below(domains().size())];
    const auto& ctx = dom.contexts[rng.below(dom.contexts.size())];
    const auto& tmpl = omission_templates()[type_index][rng.below(omission_templates()[type_index].size())];

    const std::vector<std::pair<std::string, std::string>> slots = {
        {"name", pick(dom.names, rng)},     {"price", pick(kPrices, rng)},      {"area", pick(kAreas, rng)},
        {"extra", pick(dom.extras, rng)},   {"alt", pick(dom.alternatives, rng)}, {"day", pick(kDays, rng)},
        {"people", pick(kPeople, rng)},     {"noun", dom.noun},                 {"unit", dom.unit},
    };

    DialogueCase c;
    c.id = std::move(id);
    for (const auto& turn : ctx) c.context.push_back(fill(turn, slots));
    const auto body = fill(tmpl.incomplete, slots);
    c.incomplete = collapse_gap(body, "");
    c.rewrite = collapse_gap(body, fill(tmpl.span, slots));
    c.omission_type = kTypes[type_index];
    return c;
}

std::string padded(std::string_view prefix, std::size_t i) {
    std::string digits = std::to_string(i);
    return std::string(prefix) + std::string(digits.size() < 5 ? 5 - digits.size() : 0, '0') + digits;
}

}  // namespace

const std::vector<std::string>& synth_omission_types() { return kTypes; }

CorpusSplit synth_corpus(std::uint64_t seed, std::size_t n_candidates, std::size_t n_train, std::size_t n_dev) {
    Rng root(seed);
    CorpusSplit split;
    // (context, incomplete) pairs are unique over the whole corpus so every
    // rendered case block identifies exactly one case.
    std::set<std::string> seen;

    auto fill_split = [&](std::vector<DialogueCase>& out, std::string_view label, std::size_t n) {
        Rng rng = root.substream({"synth", label});
        // Round-robin types then shuffle: each type gets floor or ceil of n/4.
        std::vector<std::size_t> types(n);
        for (std::size_t i = 0; i < n; ++i) types[i] = i % kTypes.size();
        std::shuffle(types.begin(), types.end(), rng.engine());
        for (std::size_t i = 0; i < n; ++i) {
            for (;;) {
                auto c = make_case(padded(label, i + 1), types[i], rng);
                std::string key;
                for (const auto& turn : c.context) key += turn + '\n';
                key += c.incomplete;
                if (seen.insert(key).second) {
                    out.push_back(std::move(c));
                    break;
                }
            }
        }
    };
    fill_split(split.candidates, "cand-", n_candidates);
    fill_split(split.train, "train-", n_train);
    fill_split(split.dev, "dev-", n_dev);
    return split;
}

}  // namespace demosel
