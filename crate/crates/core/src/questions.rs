//! Canonical question ids and answer options of the benchmark sheet.

/// Task category of a question.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Category {
    PresenceDetection,
    Classification,
    DistributionSegmentation,
    LocalizationDirection,
    CrossModalReasoning,
    FlightPlanning,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Question {
    pub id: &'static str,
    pub category: Category,
    pub choices: &'static [&'static str],
}

impl Question {
    pub fn accepts(&self, option: &str) -> bool {
        self.choices.contains(&option)
    }
}

use Category::*;

const YES_NO: &[&str] = &["Yes", "No"];
const OBSTRUCTION: &[&str] = &["Fully", "Partially", "Not obstructed", "No fire"];

pub const QUESTIONS: &[Question] = &[
    Question {
        id: "PD1",
        category: PresenceDetection,
        choices: YES_NO,
    },
    Question {
        id: "PD2",
        category: PresenceDetection,
        choices: YES_NO,
    },
    Question {
        id: "PD3",
        category: PresenceDetection,
        choices: YES_NO,
    },
    Question {
        id: "PD4",
        category: PresenceDetection,
        choices: YES_NO,
    },
    Question {
        id: "PD5",
        category: PresenceDetection,
        choices: YES_NO,
    },
    Question {
        id: "PD6",
        category: PresenceDetection,
        choices: YES_NO,
    },
    Question {
        id: "PD7",
        category: PresenceDetection,
        choices: &["Yes", "No", "No fire"],
    },
    Question {
        id: "PD8",
        category: PresenceDetection,
        choices: &["0", "1–2", "3–4", ">4"],
    },
    Question {
        id: "CL1",
        category: Classification,
        choices: &["Active fire", "Smoldering", "Extinguished", "No fire"],
    },
    Question {
        id: "CL2",
        category: Classification,
        choices: &["Coniferous", "Deciduous", "Grassland", "Shrubland"],
    },
    Question {
        id: "CL3",
        category: Classification,
        choices: &["Lush/Green", "Transitioning", "Dry/Cured"],
    },
    Question {
        id: "CL4",
        category: Classification,
        choices: &["Dense/Closed", "Moderate", "Sparse/Open", "No forest"],
    },
    Question {
        id: "CL5",
        category: Classification,
        choices: &["Grass", "Forest litter", "Shrubs", "Mixed"],
    },
    Question {
        id: "CL6",
        category: Classification,
        choices: &["Clear", "Partially", "No clear access", "No fire"],
    },
    Question {
        id: "DS1",
        category: DistributionSegmentation,
        choices: &["Scattered", "Concentrated", "Linear", "No active hotspots"],
    },
    Question {
        id: "DS2",
        category: DistributionSegmentation,
        choices: &["Continuous", "Patchy", "Discontinuous"],
    },
    Question {
        id: "DS3",
        category: DistributionSegmentation,
        choices: &[
            "Similar intensity",
            "Different intensity",
            "No active hotspots",
        ],
    },
    Question {
        id: "DS4",
        category: DistributionSegmentation,
        choices: &["1–25%", "25–50%", ">50%", "None"],
    },
    Question {
        id: "DS5",
        category: DistributionSegmentation,
        choices: &["1–25%", "25–50%", "50–75%", "75–100%", "None"],
    },
    Question {
        id: "DS6",
        category: DistributionSegmentation,
        choices: &["1–25%", "25–50%", "50–75%", "75–100%", "No smoke"],
    },
    Question {
        id: "DS7",
        category: DistributionSegmentation,
        choices: &["<2%", "2–4%", "4–6%", ">6%", "None"],
    },
    Question {
        id: "DS8",
        category: DistributionSegmentation,
        choices: &["<5%", "5–10%", "10–15%", ">15%", "None"],
    },
    Question {
        id: "LD1",
        category: LocalizationDirection,
        choices: &["TL", "TR", "BL", "BR", "Center", "No hotspots"],
    },
    Question {
        id: "LD2",
        category: LocalizationDirection,
        choices: &["TL", "TR", "BL", "BR", "Center", "Uniform", "No veg"],
    },
    Question {
        id: "LD3",
        category: LocalizationDirection,
        choices: &["TL", "TR", "BL", "BR", "Center", "Spread", "No smoke"],
    },
    Question {
        id: "LD4",
        category: LocalizationDirection,
        choices: &["TL", "TR", "BL", "BR", "Center", "No structures"],
    },
    Question {
        id: "CMR1",
        category: CrossModalReasoning,
        choices: OBSTRUCTION,
    },
    Question {
        id: "CMR2",
        category: CrossModalReasoning,
        choices: &[
            "Smoke",
            "Canopy",
            "Viewpoint",
            "No major limitations",
            "No fire",
        ],
    },
    Question {
        id: "CMR3",
        category: CrossModalReasoning,
        choices: OBSTRUCTION,
    },
    Question {
        id: "CMR4",
        category: CrossModalReasoning,
        choices: &[
            "100–200",
            "200–300",
            "300–400",
            "400–500",
            ">500",
            "No hotspots",
        ],
    },
    Question {
        id: "FP1",
        category: FlightPlanning,
        choices: &["Nadir (top-down)", "Oblique (angled)"],
    },
    Question {
        id: "FP2",
        category: FlightPlanning,
        choices: &["0–50 m", "50–100 m", "100–150 m", ">150 m"],
    },
    Question {
        id: "FP3",
        category: FlightPlanning,
        choices: &["High risk", "Medium risk", "Low risk", "No fire"],
    },
    Question {
        id: "FP4",
        category: FlightPlanning,
        choices: &[
            "Rugged terrain",
            "Uneven forest",
            "Smoke columns",
            "No obstacles",
        ],
    },
];

pub fn question(id: &str) -> Option<&'static Question> {
    QUESTIONS.iter().find(|q| q.id == id)
}

pub fn is_valid_option(id: &str, option: &str) -> bool {
    question(id).is_some_and(|q| q.accepts(option))
}
