//! A ten-item sample corpus of short jokes, with reference preference
//! strengths observed for them in a live 40-judge session. Used as default
//! content for demo experiments and as the default simulated ground truth.

use crate::ids::ItemId;
use crate::store::Item;

/// `(item_id, reference strength on the 0–100 display scale, text)`.
pub const SAMPLE: [(u32, f64, &str); 10] = [
    (1, 20.07, "An Englishman, a Scotsman and an Irishman walk into a bar. The Englishman wanted to go so they all had to leave. #Brexitjokes"),
    (2, 4.32, "Why do we need any colour passport? We should just be able to shout, \"British! Less of your nonsense!\" and stroll straight through."),
    (3, 25.89, "Q: With Britain leaving the EU how much space was created? A: Exactly 1GB"),
    (4, 12.41, "VOTERS: we want to give a boat a ridiculous name UK: no VOTERS: we want to break up the EU and trash the world economy UK: fine"),
    (5, 5.45, "#Brexitjokes How did the Brexit chicken cross the road? \"I never said there was a road. Or a chicken\"."),
    (6, 4.15, "After #brexit, when rapper 50 cent performs in GBR he'll appear as 10.00 pounds. #brexitjokes"),
    (7, 4.08, "I long for the simpler days when #Brexit was just a term for leaving brunch early."),
    (8, 8.9, "Say goodbye to croissants, people. Delicious croissants. We're stuck with crumpets FOREVER."),
    (9, 8.27, "Hello, I am from Britain, you know, the one that got tricked by a bus"),
    (10, 6.46, "How many Brexiteers does it take to change a light bulb? None, they are all walked out because they didn't like the way the electrician did it."),
];

pub fn sample_items() -> Vec<Item> {
    SAMPLE
        .iter()
        .map(|&(id, _, text)| Item {
            item_id: ItemId(id),
            content: text.to_string(),
        })
        .collect()
}

/// Reference strengths in item-id order, normalised to sum to one.
pub fn reference_strengths() -> Vec<f64> {
    let total: f64 = SAMPLE.iter().map(|s| s.1).sum();
    SAMPLE.iter().map(|s| s.1 / total).collect()
}
