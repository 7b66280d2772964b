//! Target-side word-order repair.
//!
//! After replacement the output still follows source order. A small rule
//! set per target language rewrites it: rules fire on the current item
//! sequence, consulting the source parse for constituent boundaries, and
//! the engine sweeps the rule list until a sweep changes nothing (with a
//! hard pass bound as a loop guard).
//!
//! Arabic-target rules: drop indefinite articles, move adjectives behind
//! their noun, merge a standalone `ال` into a following definite word,
//! turn the `was/were + participle` passive into `يتم` + verbal noun
//! order, and keep terminal punctuation last.
//!
//! English-target rules: insert the indefinite article a copula demands,
//! move adjectives in front of their noun, drop a sentence-initial `و`
//! before an adverb, move a post-verbal subject in front of its verb, and
//! keep terminal punctuation last.

use crate::parse::ParseTree;
use crate::pipeline::{Origin, PipelineError, TargetItem};
use crate::text::{is_punct_tag, join_chunks, normalize, LanguageTag};

/// Sweep bound: resources that need more than this many sweeps are
/// treated as a rule loop.
pub const MAX_PASSES: usize = 10;

/// Per-rule rewrite bound within one sweep.
const DRAIN_CAP: usize = 128;

/// The reordered items, the sweep count (including the final clean
/// sweep), and the rendered output.
#[derive(Debug, Clone, PartialEq)]
pub struct ReorderOutcome {
    pub items: Vec<TargetItem>,
    pub passes: usize,
    pub output: String,
}

/// One internal node of the source parse, as a leaf range plus links to
/// its internal-node children.
#[derive(Debug, Clone)]
struct Constituent {
    label: String,
    start: usize,
    end: usize,
    children: Vec<usize>,
}

#[derive(Debug, Clone, Default)]
struct Arena {
    nodes: Vec<Constituent>,
}

impl Arena {
    fn build(tree: &ParseTree) -> Arena {
        let mut arena = Arena::default();
        let mut next_leaf = 0;
        arena.collect(tree, &mut next_leaf);
        arena
    }

    fn collect(&mut self, tree: &ParseTree, next_leaf: &mut usize) -> Option<usize> {
        match tree {
            ParseTree::Leaf { .. } => {
                *next_leaf += 1;
                None
            }
            ParseTree::Internal { label, children } => {
                let idx = self.nodes.len();
                self.nodes.push(Constituent {
                    label: label.clone(),
                    start: *next_leaf,
                    end: *next_leaf,
                    children: Vec::new(),
                });
                let mut child_ids = Vec::new();
                for child in children {
                    if let Some(child_idx) = self.collect(child, next_leaf) {
                        child_ids.push(child_idx);
                    }
                }
                self.nodes[idx].end = *next_leaf;
                self.nodes[idx].children = child_ids;
                Some(idx)
            }
        }
    }

    /// Indices of nodes with a label, innermost (narrowest span) first.
    fn labelled(&self, label: &str) -> Vec<usize> {
        let mut ids: Vec<usize> = self
            .nodes
            .iter()
            .enumerate()
            .filter(|(_, c)| c.label == label)
            .map(|(i, _)| i)
            .collect();
        ids.sort_by_key(|&i| (self.nodes[i].end - self.nodes[i].start, self.nodes[i].start));
        ids
    }
}

fn inside(item: &TargetItem, c: &Constituent) -> bool {
    // Inserted items have span 0; anchor them to the leaf they precede so
    // a boundary index never places them in the constituent to the left.
    let span = item.source_span.max(1);
    c.start <= item.source_index && item.source_index + span <= c.end
}

fn noun_pos(pos: &str) -> bool {
    matches!(pos, "NN" | "NNS" | "NNP" | "NNPS" | "DTNN" | "DTNNS" | "DTNNP")
}

fn adjective_pos(pos: &str) -> bool {
    matches!(pos, "JJ" | "JJR" | "JJS" | "DTJJ")
}

fn verb_pos(pos: &str) -> bool {
    pos.starts_with("VB")
}

fn copula_text(text: &str) -> bool {
    matches!(
        text.to_lowercase().as_str(),
        "is" | "am" | "are" | "was" | "were" | "be" | "been" | "being" | "became" | "become"
            | "becomes"
    )
}

fn terminal_punct(text: &str) -> bool {
    matches!(text, "." | "!" | "?" | "؟")
}

/// Positions of items that still render text.
fn visible(items: &[TargetItem]) -> Vec<usize> {
    items
        .iter()
        .enumerate()
        .filter(|(_, item)| !item.text.is_empty())
        .map(|(i, _)| i)
        .collect()
}

/// `a` or `an`, picked from the first letter of the following word.
fn indefinite_article(following: &str) -> &'static str {
    match following.chars().next().map(|c| c.to_ascii_lowercase()) {
        Some('a' | 'e' | 'i' | 'o' | 'u') => "an",
        _ => "a",
    }
}

type Rule = fn(&mut Vec<TargetItem>, &Arena) -> bool;

/// Arabic target, rule 1: drop English indefinite articles outright.
fn r1_drop_indefinite(items: &mut Vec<TargetItem>, _arena: &Arena) -> bool {
    for item in items.iter_mut() {
        if item.source_pos == "DT"
            && matches!(normalize(&item.source_surface).as_str(), "a" | "an")
            && !item.text.is_empty()
        {
            item.text.clear();
            item.origin = Origin::Dropped;
            return true;
        }
    }
    false
}

/// Shared core of the adjective/noun ordering rules: within one NP, swap
/// one adjacent visible (first_pos, second_pos) pair.
fn swap_in_np(
    items: &mut Vec<TargetItem>,
    arena: &Arena,
    first: fn(&str) -> bool,
    second: fn(&str) -> bool,
) -> bool {
    for np in arena.labelled("NP") {
        let node = &arena.nodes[np];
        let vis = visible(items);
        for pair in vis.windows(2) {
            let (p, q) = (pair[0], pair[1]);
            if inside(&items[p], node)
                && inside(&items[q], node)
                && first(&items[p].source_pos)
                && second(&items[q].source_pos)
            {
                items.swap(p, q);
                return true;
            }
        }
    }
    false
}

/// Arabic target, rule 2: an adjective directly before its noun moves
/// behind it (Arabic adjectives follow their noun).
fn r2_adjective_after_noun(items: &mut Vec<TargetItem>, arena: &Arena) -> bool {
    swap_in_np(items, arena, adjective_pos, noun_pos)
}

/// Arabic target, rule 3: a standalone `ال` merges into a following word
/// that already starts with `ال` (the definite article never doubles).
fn r3_merge_definite_article(items: &mut Vec<TargetItem>, _arena: &Arena) -> bool {
    let vis = visible(items);
    for pair in vis.windows(2) {
        let (p, q) = (pair[0], pair[1]);
        if items[p].text == "ال" && items[q].text.starts_with("ال") {
            items[p].text.clear();
            items[p].origin = Origin::Dropped;
            return true;
        }
    }
    false
}

/// Arabic target, rule 4: `noun + was/were + participle` becomes the
/// Arabic present-passive shape: the auxiliary turns into `يتم`, and verb
/// then noun follow (`الصور كانت عرض` → `يتم عرض الصور`).
fn r4_passive_auxiliary(items: &mut Vec<TargetItem>, _arena: &Arena) -> bool {
    let vis = visible(items);
    for trio in vis.windows(3) {
        let (p, q, r) = (trio[0], trio[1], trio[2]);
        let aux_source = normalize(&items[q].source_surface);
        if noun_pos(&items[p].source_pos)
            && items[q].source_pos == "VBD"
            && matches!(aux_source.as_str(), "was" | "were")
            && items[r].source_pos == "VBN"
            && items[r].origin == Origin::Ontology
        {
            items[q].text = "يتم".to_string();
            let noun = items.remove(p);
            items.insert(r, noun);
            return true;
        }
    }
    false
}

/// Keep terminal punctuation at the end of the sentence (both targets).
fn keep_terminal_punct_last(items: &mut Vec<TargetItem>, _arena: &Arena) -> bool {
    let vis = visible(items);
    for (slot, &p) in vis.iter().enumerate() {
        if terminal_punct(&items[p].text)
            && vis[slot + 1..]
                .iter()
                .any(|&q| !terminal_punct(&items[q].text))
        {
            let punct = items.remove(p);
            items.push(punct);
            return true;
        }
    }
    false
}

/// English target, rule 1: a copular verb introducing an indefinite
/// singular NP needs the article the Arabic source never wrote
/// (`became populated city` → `became a populated city`).
fn e1_insert_indefinite_article(items: &mut Vec<TargetItem>, arena: &Arena) -> bool {
    for vp in arena.labelled("VP") {
        let vp_node = &arena.nodes[vp];
        let vis = visible(items);
        let copula = vis
            .iter()
            .copied()
            .find(|&p| inside(&items[p], vp_node) && copula_text(&items[p].text));
        let Some(copula) = copula else { continue };
        for &np in &vp_node.children {
            let np_node = &arena.nodes[np];
            if np_node.label != "NP" {
                continue;
            }
            let np_items: Vec<usize> = vis
                .iter()
                .copied()
                .filter(|&p| inside(&items[p], np_node))
                .collect();
            let Some(&first) = np_items.first() else { continue };
            if first <= copula {
                continue;
            }
            let Some(&head) = np_items
                .iter()
                .find(|&&p| noun_pos(&items[p].source_pos))
            else {
                continue;
            };
            // Only a bare singular common noun takes the article.
            if items[head].source_pos != "NN"
                || normalize(&items[head].source_surface).starts_with("ال")
            {
                continue;
            }
            let np_has_article = np_items
                .iter()
                .any(|&p| items[p].source_pos == "DT" || items[p].inserted);
            if np_has_article {
                continue;
            }
            let article = TargetItem {
                source_index: items[first].source_index,
                source_span: 0,
                source_surface: String::new(),
                source_pos: "DT".to_string(),
                text: indefinite_article(&items[first].text).to_string(),
                origin: Origin::Dictionary,
                inserted: true,
            };
            items.insert(first, article);
            return true;
        }
    }
    false
}

/// English target, rule 2: an adjective trailing its noun moves in front
/// of it (`city populated` → `populated city`).
fn e2_adjective_before_noun(items: &mut Vec<TargetItem>, arena: &Arena) -> bool {
    swap_in_np(items, arena, noun_pos, adjective_pos)
}

/// English target, rule 3: the sentence-initial conjunction `و` is
/// dropped when a sentence adverb follows; English starts with the
/// adverb alone.
fn e3_drop_initial_conjunction(items: &mut Vec<TargetItem>, _arena: &Arena) -> bool {
    let vis = visible(items);
    if vis.len() < 2 {
        return false;
    }
    let (p, q) = (vis[0], vis[1]);
    if items[p].source_pos == "CC"
        && normalize(&items[p].source_surface) == "و"
        && matches!(items[q].source_pos.as_str(), "RB" | "RBR" | "RBS")
    {
        items[p].text.clear();
        items[p].origin = Origin::Dropped;
        return true;
    }
    false
}

/// English target, rule 4: Arabic verb-subject order flips; the first NP
/// child of a verb-initial VP moves in front of the verb
/// (`became Shibam` → `Shibam became`).
fn e4_subject_before_verb(items: &mut Vec<TargetItem>, arena: &Arena) -> bool {
    for vp in arena.labelled("VP") {
        let vp_node = &arena.nodes[vp];
        let vis = visible(items);
        let inside_vp: Vec<usize> = vis
            .iter()
            .copied()
            .filter(|&p| inside(&items[p], vp_node))
            .collect();
        let Some(&verb) = inside_vp.first() else { continue };
        if !verb_pos(&items[verb].source_pos) {
            continue;
        }
        let subject_np = vp_node.children.iter().find(|&&np| {
            let np_node = &arena.nodes[np];
            if np_node.label != "NP" {
                return false;
            }
            let np_items: Vec<usize> = inside_vp
                .iter()
                .copied()
                .filter(|&p| inside(&items[p], np_node))
                .collect();
            !np_items.is_empty() && np_items.iter().all(|&p| p > verb)
        });
        let Some(&np) = subject_np else { continue };
        let np_node = &arena.nodes[np];
        let np_positions: Vec<usize> = vis
            .iter()
            .copied()
            .filter(|&p| inside(&items[p], np_node))
            .collect();
        // Detach the subject items back to front, then reinsert them in
        // order just before the verb.
        let mut moved = Vec::new();
        for &p in np_positions.iter().rev() {
            moved.push(items.remove(p));
        }
        moved.reverse();
        for item in moved.into_iter().rev() {
            items.insert(verb, item);
        }
        return true;
    }
    false
}

const ARABIC_RULES: [Rule; 5] = [
    r1_drop_indefinite,
    r2_adjective_after_noun,
    r3_merge_definite_article,
    r4_passive_auxiliary,
    keep_terminal_punct_last,
];

const ENGLISH_RULES: [Rule; 5] = [
    e1_insert_indefinite_article,
    e2_adjective_before_noun,
    e3_drop_initial_conjunction,
    e4_subject_before_verb,
    keep_terminal_punct_last,
];

/// Sweep the target-language rule list over the items until a full sweep
/// changes nothing. The sweep count includes the final clean sweep, so an
/// already-ordered sentence reports one pass.
pub fn reorder(
    items: &[TargetItem],
    tree: &ParseTree,
    target: LanguageTag,
) -> Result<ReorderOutcome, PipelineError> {
    let arena = Arena::build(tree);
    let rules: &[Rule] = match target {
        LanguageTag::Arabic => &ARABIC_RULES,
        LanguageTag::English => &ENGLISH_RULES,
    };
    let mut items = items.to_vec();
    let mut passes = 0;
    loop {
        passes += 1;
        if passes > MAX_PASSES {
            return Err(PipelineError::RuleLoopDetected { passes: MAX_PASSES });
        }
        let mut changed = false;
        for rule in rules {
            let mut drained = 0;
            while rule(&mut items, &arena) {
                changed = true;
                drained += 1;
                if drained > DRAIN_CAP {
                    return Err(PipelineError::RuleLoopDetected { passes });
                }
            }
        }
        if !changed {
            break;
        }
    }
    let output = join_chunks(items.iter().map(|item| item.text.as_str()));
    Ok(ReorderOutcome {
        items,
        passes,
        output,
    })
}

/// Multiset of source surfaces that must survive reordering: translated
/// items (dictionary or ontology) excluding articles, punctuation, and
/// rule-inserted material. Sorted for comparison.
pub fn source_signature(items: &[TargetItem]) -> Vec<String> {
    let mut sources: Vec<String> = items
        .iter()
        .filter(|item| !item.inserted)
        .filter(|item| matches!(item.origin, Origin::Dictionary | Origin::Ontology))
        .filter(|item| item.source_pos != "DT" && !is_punct_tag(&item.source_pos))
        .map(|item| normalize(&item.source_surface))
        .collect();
    sources.sort();
    sources
}
