//! The built-in sequential-game library, stored as literal source text.

use super::{parse_tree, GameTree, TreeError};

const ESCALATION: &str = "\
Alice_choice_1: [0,0],
Alice_choice_2:
{
     Bob_choice_1: [1,-2],
     Bob_choice_2: {
        Alice_choice_1: [-2,1],
        Alice_choice_2: [-1,-1]
    }
}";

const MONOPOLY: &str = "\
Alice_choice_1: [0,2],
Alice_choice_2:
{
     Bob_choice_1: [2, 1],
     Bob_choice_2: [-1, -1]
}";

const HOT_COLD: &str = "\
Alice_choice_1:
{
     Bob_choice_1: [3, 2],
     Bob_choice_2: [2, 3]
},
Alice_choice_2:
{
     Bob_choice_1: [1, 4],
     Bob_choice_2: [4, 1]
}";

const DRACO: &str = "\
Alice_choice_1:
    {
         Bob_choice_1: [5, 5],
         Bob_choice_2:
            {
                Alice_choice_1: [2, 2],
                Alice_choice_2: [3, 4]
            }
    },
Alice_choice_2:
    {
         Bob_choice_1: [4, 5],
         Bob_choice_2:
            {
                Alice_choice_1: [5, 3],
                Alice_choice_2: [2, 2]
            }
    }";

const TRIGAME: &str = "\
Alice_choice_1:
{
     Bob_choice_1:
        {
            Alice_choice_1: [20, 3],
            Alice_choice_2: [0, 4]
        },
     Bob_choice_2:
        {
            Alice_choice_1: [2, 5],
            Alice_choice_2: [3, 4]
        }
},
Alice_choice_2:
{
     Bob_choice_1:
        {
            Alice_choice_1: [1, 5],
            Alice_choice_2: [4, 10]
        },
     Bob_choice_2:
        {
            Alice_choice_1: [2, 1],
            Alice_choice_2: [3, 2]
        }
}";

/// Names accepted by [`catalog_tree`].
pub fn tree_names() -> Vec<&'static str> {
    vec!["escalation", "monopoly", "hot_cold", "draco", "trigame"]
}

/// The stored literal for a catalog tree.
pub fn catalog_tree_source(name: &str) -> Result<&'static str, TreeError> {
    match name {
        "escalation" => Ok(ESCALATION),
        "monopoly" => Ok(MONOPOLY),
        "hot_cold" => Ok(HOT_COLD),
        "draco" => Ok(DRACO),
        "trigame" => Ok(TRIGAME),
        other => Err(TreeError::UnknownCatalogName(other.to_string())),
    }
}

/// Parses and returns a catalog tree by name.
pub fn catalog_tree(name: &str) -> Result<GameTree, TreeError> {
    parse_tree(catalog_tree_source(name)?)
}
