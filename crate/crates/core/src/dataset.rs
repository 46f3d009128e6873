//! The evaluation data collected with the original prototype: twelve users
//! (three per disability), two iterations of three ten-repetition sessions.
//!
//! Times are per repetition in whole seconds. Errors were only recorded per
//! session, so [`logs`] spreads each session total over its repetitions,
//! one at a time from the first repetition onwards.

use crate::activity::{ActivityKind, RepetitionResult};
use crate::analytics::SessionLog;
use crate::content::Topic;
use crate::models::{Disability, ProfileId};

/// Disabilities in the order the users are stored.
pub const DISABILITIES: [Disability; 4] = [
    Disability::Autism,
    Disability::Hearing,
    Disability::Physical,
    Disability::Visual,
];

pub const USERS_PER_DISABILITY: usize = 3;

/// The activity the evaluation sessions are recorded under.
pub const ACTIVITY: ActivityKind = ActivityKind::ConceptAssociation(Topic::Animals);

/// `TIMES[iteration][disability][user][session][repetition]`
pub const TIMES: [[[[[u32; 10]; 3]; 3]; 4]; 2] = [
    [
        [
            [
                [14, 9, 7, 8, 7, 11, 12, 10, 13, 9],
                [48, 18, 22, 18, 19, 13, 12, 13, 16, 12],
                [10, 14, 10, 10, 10, 10, 10, 10, 10, 10],
            ],
            [
                [70, 85, 6, 16, 19, 43, 11, 21, 21, 56],
                [10, 10, 18, 13, 10, 13, 13, 13, 13, 12],
                [40, 27, 14, 25, 14, 33, 33, 22, 15, 18],
            ],
            [
                [20, 20, 16, 20, 22, 22, 22, 18, 7, 28],
                [18, 17, 17, 19, 17, 26, 17, 20, 18, 18],
                [19, 13, 12, 42, 20, 13, 14, 14, 12, 13],
            ],
        ],
        [
            [
                [47, 17, 14, 8, 19, 6, 19, 17, 15, 18],
                [27, 4, 12, 60, 12, 10, 10, 12, 12, 13],
                [12, 11, 12, 11, 11, 11, 13, 20, 14, 12],
            ],
            [
                [17, 50, 10, 10, 14, 14, 15, 28, 27, 32],
                [14, 15, 15, 13, 14, 13, 16, 12, 20, 13],
                [40, 17, 13, 40, 17, 13, 13, 12, 14, 18],
            ],
            [
                [27, 28, 17, 17, 16, 15, 18, 19, 20, 22],
                [15, 18, 18, 13, 20, 22, 14, 15, 15, 13],
                [17, 17, 33, 20, 14, 14, 13, 11, 12, 12],
            ],
        ],
        [
            [
                [12, 24, 15, 7, 10, 15, 7, 10, 18, 16],
                [7, 64, 12, 15, 7, 16, 14, 18, 18, 7],
                [7, 12, 8, 7, 7, 7, 23, 15, 14, 7],
            ],
            [
                [14, 16, 65, 12, 32, 23, 18, 22, 39, 8],
                [69, 7, 30, 22, 6, 28, 54, 7, 8, 10],
                [7, 7, 7, 54, 8, 17, 12, 12, 13, 7],
            ],
            [
                [20, 27, 18, 32, 25, 30, 61, 40, 24, 57],
                [8, 6, 7, 6, 11, 15, 19, 5, 10, 7],
                [7, 9, 10, 39, 9, 13, 14, 7, 10, 9],
            ],
        ],
        [
            [
                [6, 7, 14, 13, 14, 14, 14, 12, 9, 13],
                [10, 7, 7, 7, 7, 7, 9, 7, 7, 8],
                [7, 10, 6, 10, 10, 9, 10, 7, 9, 7],
            ],
            [
                [25, 22, 27, 32, 24, 24, 18, 21, 23, 30],
                [21, 17, 18, 24, 16, 14, 12, 23, 22, 25],
                [19, 13, 14, 15, 16, 16, 14, 12, 14, 14],
            ],
            [
                [28, 33, 32, 32, 32, 25, 27, 28, 29, 30],
                [21, 22, 24, 33, 23, 27, 26, 20, 21, 22],
                [25, 23, 21, 23, 24, 23, 20, 19, 20, 20],
            ],
        ],
    ],
    [
        [
            [
                [12, 12, 12, 12, 12, 12, 25, 13, 11, 12],
                [13, 14, 14, 13, 13, 14, 13, 13, 13, 18],
                [7, 13, 7, 8, 7, 7, 7, 6, 7, 12],
            ],
            [
                [10, 14, 12, 13, 14, 13, 19, 14, 16, 19],
                [14, 18, 20, 12, 48, 15, 12, 13, 13, 15],
                [13, 15, 16, 11, 11, 14, 14, 15, 11, 14],
            ],
            [
                [22, 16, 15, 15, 15, 17, 13, 13, 15, 16],
                [9, 11, 12, 13, 12, 14, 13, 16, 17, 20],
                [12, 12, 13, 20, 13, 24, 15, 15, 16, 17],
            ],
        ],
        [
            [
                [11, 20, 31, 22, 17, 16, 13, 15, 12, 39],
                [12, 12, 13, 12, 13, 15, 13, 16, 13, 12],
                [12, 20, 13, 10, 17, 19, 10, 10, 10, 10],
            ],
            [
                [17, 41, 12, 19, 12, 14, 16, 12, 13, 13],
                [21, 27, 17, 13, 13, 18, 19, 12, 16, 18],
                [12, 15, 14, 11, 15, 16, 15, 14, 10, 15],
            ],
            [
                [23, 19, 21, 18, 14, 15, 17, 25, 15, 14],
                [27, 26, 23, 24, 28, 26, 22, 24, 24, 23],
                [18, 15, 15, 16, 15, 14, 20, 13, 13, 17],
            ],
        ],
        [
            [
                [10, 7, 30, 10, 7, 10, 11, 11, 19, 13],
                [8, 7, 10, 13, 22, 15, 10, 24, 10, 11],
                [7, 7, 9, 7, 7, 15, 18, 9, 9, 7],
            ],
            [
                [75, 12, 20, 7, 11, 12, 30, 15, 6, 10],
                [12, 8, 7, 6, 7, 9, 7, 9, 7, 7],
                [15, 9, 9, 17, 9, 7, 7, 50, 7, 39],
            ],
            [
                [10, 8, 12, 10, 11, 8, 15, 9, 10, 8],
                [10, 9, 12, 22, 11, 23, 24, 24, 34, 11],
                [12, 27, 7, 8, 11, 9, 7, 9, 7, 7],
            ],
        ],
        [
            [
                [13, 10, 7, 10, 15, 7, 7, 8, 26, 14],
                [12, 7, 7, 12, 9, 7, 10, 8, 8, 7],
                [7, 10, 13, 18, 9, 7, 9, 7, 21, 10],
            ],
            [
                [9, 12, 10, 7, 9, 34, 9, 26, 12, 8],
                [17, 9, 12, 7, 9, 8, 8, 10, 7, 8],
                [7, 7, 7, 7, 7, 7, 9, 19, 7, 16],
            ],
            [
                [18, 20, 22, 15, 23, 15, 17, 17, 21, 20],
                [11, 16, 14, 23, 13, 17, 20, 14, 11, 11],
                [14, 15, 11, 13, 15, 15, 10, 9, 12, 10],
            ],
        ],
    ],
];

/// `ERRORS[iteration][disability][user][session]`, session totals.
pub const ERRORS: [[[[u32; 3]; 3]; 4]; 2] = [
    [
        [[0, 2, 0], [2, 1, 0], [1, 0, 2]],
        [[2, 3, 1], [6, 5, 1], [4, 3, 3]],
        [[5, 4, 4], [4, 7, 4], [3, 6, 6]],
        [[7, 3, 2], [5, 5, 3], [8, 7, 4]],
    ],
    [
        [[2, 0, 0], [1, 1, 0], [1, 0, 0]],
        [[2, 2, 1], [4, 7, 5], [3, 3, 2]],
        [[5, 2, 5], [6, 2, 4], [8, 3, 4]],
        [[2, 2, 1], [3, 4, 4], [5, 4, 2]],
    ],
];

pub fn user_id(disability: Disability, user: usize) -> ProfileId {
    ProfileId::new(format!("{}-{}", disability.to_string().to_lowercase(), user + 1))
}

/// Splits a session's error total over its repetitions.
pub fn spread_errors(total: u32, repetitions: u32) -> Vec<u32> {
    (0..repetitions)
        .map(|i| total / repetitions + u32::from(i < total % repetitions))
        .collect()
}

/// All 72 session logs, ordered by iteration, disability, user and session.
pub fn logs() -> Vec<SessionLog> {
    let mut out = Vec::with_capacity(72);
    for (it, per_iteration) in TIMES.iter().enumerate() {
        for (d, per_disability) in per_iteration.iter().enumerate() {
            for (u, per_user) in per_disability.iter().enumerate() {
                for (s, times) in per_user.iter().enumerate() {
                    let errors = spread_errors(ERRORS[it][d][u][s], times.len() as u32);
                    out.push(SessionLog {
                        user_id: user_id(DISABILITIES[d], u),
                        disability: DISABILITIES[d],
                        iteration: it as u32 + 1,
                        session_index: s as u32 + 1,
                        activity_kind: ACTIVITY,
                        results: times
                            .iter()
                            .zip(errors)
                            .enumerate()
                            .map(|(r, (&t, e))| RepetitionResult {
                                repetition_index: r as u32 + 1,
                                duration_seconds: t as u64,
                                errors: e,
                            })
                            .collect(),
                        incomplete: false,
                    });
                }
            }
        }
    }
    out
}
