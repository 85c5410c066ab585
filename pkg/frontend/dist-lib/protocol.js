const CHARSET = "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
const SUBSTITUTION = "?";
export {
  CHARSET,
  SUBSTITUTION
};
