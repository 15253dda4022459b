//! The scene grammar `S -> ACT the COL OBJ.`

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

macro_rules! word_enum {
    ($name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(rename_all = "snake_case")]
        pub enum $name { $($variant),+ }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(&self) -> &'static str {
                match self { $($name::$variant => $text),+ }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                let key = s.trim().to_ascii_lowercase().replace('_', " ");
                $name::ALL
                    .iter()
                    .copied()
                    .find(|v| v.as_str() == key)
                    .ok_or_else(|| Error::Argument(format!("unknown {} '{s}'", stringify!($name).to_lowercase())))
            }
        }
    };
}

word_enum!(Action { Pull => "pull", Push => "push", ShowMe => "show me", Slide => "slide" });
word_enum!(Colour { Blue => "blue", Green => "green", Red => "red", Yellow => "yellow" });
word_enum!(Object { Apple => "apple", Banana => "banana", Dice => "dice", Phone => "phone" });

/// The symbolic content of one scene.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Triple {
    pub action: Action,
    pub colour: Colour,
    pub object: Object,
}

impl Triple {
    pub fn sentence(&self) -> String {
        format!("{} the {} {}.", self.action, self.colour, self.object)
    }
}

/// All sentences of the grammar in action-colour-object order.
pub fn grammar_enumerate() -> Vec<(String, Triple)> {
    enumerate_subset(Action::ALL, Colour::ALL, Object::ALL)
}

pub fn enumerate_subset(actions: &[Action], colours: &[Colour], objects: &[Object]) -> Vec<(String, Triple)> {
    let mut out = Vec::with_capacity(actions.len() * colours.len() * objects.len());
    for &action in actions {
        for &colour in colours {
            for &object in objects {
                let t = Triple { action, colour, object };
                out.push((t.sentence(), t));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn sixty_four_unique_sentences() {
        let all = grammar_enumerate();
        assert_eq!(all.len(), 64);
        let sentences: HashSet<_> = all.iter().map(|(s, _)| s.clone()).collect();
        assert_eq!(sentences.len(), 64);
        assert!(sentences.contains("slide the red apple."));
        assert!(sentences.contains("show me the yellow banana."));
    }

    #[test]
    fn parses_words() {
        assert_eq!("show_me".parse::<Action>().unwrap(), Action::ShowMe);
        assert_eq!("Red".parse::<Colour>().unwrap(), Colour::Red);
        assert!("purple".parse::<Colour>().is_err());
    }
}
