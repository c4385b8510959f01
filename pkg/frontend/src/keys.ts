/**
 * Keyboard bindings: the desktop stand-ins for the shake / rotate / swipe /
 * head-turn gesture contract. The same table renders as the on-screen help.
 */

export interface Binding {
  keys: string[];
  gesture: string;
  action: string;
}

export const BINDINGS: Binding[] = [
  { keys: ["Space"], gesture: "shake", action: "choose at a branching point" },
  { keys: ["ArrowLeft", "ArrowRight"], gesture: "rotate", action: "pick the left / right option" },
  { keys: ["[", "]"], gesture: "swipe left/right", action: "previous / next branch" },
  { keys: ["PageUp", "PageDown"], gesture: "swipe up/down", action: "previous / next branching point" },
  { keys: ["Enter"], gesture: "double tap", action: "confirm navigation target" },
  { keys: ["Escape"], gesture: "", action: "cancel navigation" },
  { keys: ["k"], gesture: "double tap", action: "play / pause" },
  { keys: ["j", "l"], gesture: "two-finger swipe", action: "seek -5 s / +5 s" },
  { keys: ["w", "a", "s", "d"], gesture: "head turn", action: "explore while paused" },
  { keys: ["t"], gesture: "", action: "export the playthrough trace" },
];
